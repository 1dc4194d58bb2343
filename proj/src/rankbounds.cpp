#include "ploewner/rankbounds.hpp"

#include <cmath>
#include <stdexcept>

namespace ploewner {

namespace {

double divided_power(std::size_t k, double pi, double phi) {
    // sum_{m=0}^{k-1} pi^m phi^(k-1-m); no division by pi - phi.
    double acc = 0.0;
    double pi_pow = 1.0;
    for (std::size_t m = 0; m < k; ++m) {
        acc += pi_pow * std::pow(phi, static_cast<double>(k - 1 - m));
        pi_pow *= pi;
    }
    return acc;
}

struct PencilRanks {
    std::size_t L = 0;
    std::size_t Ls = 0;
};

PencilRanks pencil_ranks(const ParametricModel& model, const Partition& part, double rel_tol) {
    std::vector<double> params(part.left.size() + part.right.size());
    for (const auto& pt : part.left) params.at(pt.index) = pt.value;
    for (const auto& pt : part.right) params.at(pt.index) = pt.value;
    const SnapshotSet snaps = sample(model, params);
    const LoewnerMatrices mats = assemble_loewner(snaps, part);
    return {matrix_rank(mats.L, rel_tol), matrix_rank(mats.Ls, rel_tol)};
}

RankReport compute_report(const ParametricModel& model, const Partition& part, double rel_tol) {
    validate_partition(part, part.left.size() + part.right.size());
    RankReport rep;
    const std::size_t h = model.degree();
    for (const MatR& g : model.gamma()) rep.rank_gamma.push_back(matrix_rank(g, rel_tol));
    for (std::size_t k = 0; k <= h + 1; ++k) rep.rank_xi.push_back(matrix_rank(xi_core(k, part), rel_tol));
    for (std::size_t k = 0; k <= h; ++k) {
        rep.bound_L += rep.rank_gamma[k] * rep.rank_xi[k];
        rep.bound_Ls += rep.rank_gamma[k] * rep.rank_xi[k + 1];
    }
    const PencilRanks pr = pencil_ranks(model, part, rel_tol);
    rep.rank_L = pr.L;
    rep.rank_Ls = pr.Ls;
    rep.holds = {rep.rank_L <= rep.bound_L, rep.rank_Ls <= rep.bound_Ls};
    return rep;
}

} // namespace

MatR xi_core(std::size_t k, const Partition& part) {
    const auto M = static_cast<Eigen::Index>(part.left.size());
    const auto N = static_cast<Eigen::Index>(part.right.size());
    MatR core(M, N);
    for (Eigen::Index i = 0; i < M; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) core(i, j) = divided_power(k, part.left[i].value, part.right[j].value);
    }
    return core;
}

MatR xi_matrix(std::size_t k, const Partition& part, Eigen::Index block_rows, Eigen::Index block_cols) {
    const MatR core = xi_core(k, part);
    MatR out(core.rows() * block_rows, core.cols() * block_cols);
    for (Eigen::Index i = 0; i < core.rows(); ++i) {
        for (Eigen::Index j = 0; j < core.cols(); ++j) {
            out.block(i * block_rows, j * block_cols, block_rows, block_cols).setConstant(core(i, j));
        }
    }
    return out;
}

RankReport affine_bounds(const ParametricModel& model, const Partition& part, double rel_tol) {
    if (model.degree() != 1) {
        throw std::invalid_argument("affine_bounds: model has degree " + std::to_string(model.degree()) +
                                    "; use poly_bounds for non-affine models");
    }
    RankReport rep = compute_report(model, part, rel_tol);
    rep.affine = true;
    rep.affine_equality = rep.rank_L == rep.rank_gamma[1];
    return rep;
}

RankReport poly_bounds(const ParametricModel& model, const Partition& part, double rel_tol) {
    RankReport rep = compute_report(model, part, rel_tol);
    if (model.degree() == 1) {
        rep.affine = true;
        rep.affine_equality = rep.rank_L == rep.rank_gamma[1];
    }
    return rep;
}

} // namespace ploewner
