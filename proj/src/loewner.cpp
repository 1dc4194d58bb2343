#include "ploewner/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ploewner/parallel.hpp"

namespace ploewner {

std::vector<double> Partition::left_values() const {
    std::vector<double> out;
    for (const auto& pt : left) out.push_back(pt.value);
    return out;
}

std::vector<double> Partition::right_values() const {
    std::vector<double> out;
    for (const auto& pt : right) out.push_back(pt.value);
    return out;
}

void validate_partition(const Partition& part, std::size_t n_samples) {
    if (part.left.empty() || part.right.empty()) {
        throw std::invalid_argument("partition: both left and right sets must be nonempty");
    }
    std::vector<int> seen(n_samples, 0);
    auto mark = [&](const PartitionPoint& pt) {
        if (pt.index >= n_samples) {
            throw std::invalid_argument("partition: sample index " + std::to_string(pt.index) +
                                        " out of range (" + std::to_string(n_samples) + " samples)");
        }
        if (seen[pt.index]++) {
            throw std::invalid_argument("partition: sample " + std::to_string(pt.index) +
                                        " used more than once");
        }
    };
    for (const auto& pt : part.left) mark(pt);
    for (const auto& pt : part.right) mark(pt);
    if (part.left.size() + part.right.size() != n_samples) {
        throw std::invalid_argument("partition: " +
                                    std::to_string(part.left.size() + part.right.size()) +
                                    " points assigned but there are " + std::to_string(n_samples) +
                                    " samples");
    }
    for (const auto& l : part.left) {
        for (const auto& r : part.right) {
            if (l.value == r.value) {
                std::ostringstream os;
                os << "partition: left and right points coincide at " << l.value;
                throw std::invalid_argument(os.str());
            }
        }
    }
}

Partition alternating_partition(std::span<const double> params) {
    if (params.size() < 2) throw std::invalid_argument("need >= 2 distinct parameters");
    std::vector<std::size_t> order(params.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return params[a] < params[b]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (params[order[k]] == params[order[k - 1]]) {
            std::ostringstream os;
            os << "duplicate parameter value " << params[order[k]];
            throw std::invalid_argument(os.str());
        }
    }
    Partition part;
    for (std::size_t k = 0; k < order.size(); ++k) {
        PartitionPoint pt{order[k], params[order[k]]};
        (k % 2 == 0 ? part.left : part.right).push_back(pt);
    }
    return part;
}

Partition explicit_partition(std::span<const double> params, std::span<const double> left,
                             std::span<const double> right) {
    auto locate = [&](double v) -> std::size_t {
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i] == v) return i;
        }
        std::ostringstream os;
        os << "partition: value " << v << " is not one of the sample parameters";
        throw std::invalid_argument(os.str());
    };
    Partition part;
    for (double v : left) part.left.push_back({locate(v), v});
    for (double v : right) part.right.push_back({locate(v), v});
    validate_partition(part, params.size());
    return part;
}

LoewnerMatrices assemble_loewner(const SnapshotSet& snapshots, const Partition& part, unsigned threads) {
    validate_partition(part, snapshots.size());
    const SystemDims& d = snapshots.dims();
    const Eigen::Index k1 = d.block_rows();
    const Eigen::Index k2 = d.block_cols();
    const auto M = static_cast<Eigen::Index>(part.left.size());
    const auto N = static_cast<Eigen::Index>(part.right.size());

    LoewnerMatrices out;
    out.L.resize(M * k1, N * k2);
    out.Ls.resize(M * k1, N * k2);
    out.V.resize(M * k1, k2);
    out.W.resize(k1, N * k2);
    for (Eigen::Index i = 0; i < M; ++i) out.V.middleRows(i * k1, k1) = snapshots[part.left[i].index].G;
    for (Eigen::Index j = 0; j < N; ++j) out.W.middleCols(j * k2, k2) = snapshots[part.right[j].index].G;

    parallel_for(static_cast<std::size_t>(M * N), threads, [&](std::size_t cell) {
        const auto i = static_cast<Eigen::Index>(cell) / N;
        const auto j = static_cast<Eigen::Index>(cell) % N;
        const double pi = part.left[i].value;
        const double phi = part.right[j].value;
        const MatR& Gl = snapshots[part.left[i].index].G;
        const MatR& Gr = snapshots[part.right[j].index].G;
        const double denom = pi - phi;
        out.L.block(i * k1, j * k2, k1, k2) = (Gl - Gr) / denom;
        out.Ls.block(i * k1, j * k2, k1, k2) = (pi * Gl - phi * Gr) / denom;
    });
    return out;
}

LoewnerPencil build_pencil(const SnapshotSet& snapshots, const Partition& part, unsigned threads) {
    LoewnerPencil pencil;
    pencil.dims = snapshots.dims();
    pencil.partition = part;
    pencil.mats = assemble_loewner(snapshots, part, threads);
    const MatR& L = pencil.mats.L;
    const MatR& Ls = pencil.mats.Ls;

    MatR row(L.rows(), 2 * L.cols());
    row << L, Ls;
    SvdResult s_row = svd(row, SvdFactors::left);
    row.resize(0, 0);
    pencil.sv_row = std::move(s_row.singular_values);
    pencil.X = std::move(s_row.U);

    MatR col(2 * L.rows(), L.cols());
    col << L, Ls;
    SvdResult s_col = svd(col, SvdFactors::right);
    col.resize(0, 0);
    pencil.sv_col = std::move(s_col.singular_values);
    pencil.Y = s_col.Vt.transpose();
    return pencil;
}

std::size_t tail_energy_rank(const VecR& sigma, double eps) {
    const auto n = static_cast<std::size_t>(sigma.size());
    if (n == 0) return 0;
    // tail[k] = sum_{i >= k} s_i^2, summed from the small end.
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) tail[k] = tail[k + 1] + sigma(static_cast<Eigen::Index>(k)) * sigma(static_cast<Eigen::Index>(k));
    const double total = tail[0];
    if (total <= 0.0) return 0;
    for (std::size_t r = 0; r <= n; ++r) {
        if (std::sqrt(tail[r] / total) <= eps) return r;
    }
    return n;
}

std::size_t literal_rule_rank(const VecR& sigma, double eps) {
    const auto n = static_cast<std::size_t>(sigma.size());
    const double total = sigma.squaredNorm();
    if (n == 0 || total <= 0.0) return 0;
    double head = 0.0; // sum_{i < k} s_i^2 with 1-based i
    for (std::size_t k = 1; k <= n; ++k) {
        if (eps <= std::sqrt(head / total)) return k;
        head += sigma(static_cast<Eigen::Index>(k - 1)) * sigma(static_cast<Eigen::Index>(k - 1));
    }
    return n;
}

TruncationReport truncation_report(const LoewnerPencil& pencil, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("truncation tolerance must lie in (0, 1)");
    TruncationReport rep;
    rep.cap = numerical_rank(pencil.sv_row, 1e-12);
    rep.r = std::min(tail_energy_rank(pencil.sv_row, eps), rep.cap);
    rep.r_col = std::min(tail_energy_rank(pencil.sv_col, eps), numerical_rank(pencil.sv_col, 1e-12));
    rep.r_literal = literal_rule_rank(pencil.sv_row, eps);
    if (rep.r_col != rep.r) {
        rep.warnings.push_back("column pencil [L; Ls] selects r = " + std::to_string(rep.r_col) +
                               " but row pencil [L Ls] selects r = " + std::to_string(rep.r));
    }
    if (rep.r_literal != rep.r) {
        rep.warnings.push_back("cumulative-energy reading of the truncation rule gives r = " +
                               std::to_string(rep.r_literal) + "; using tail-energy r = " +
                               std::to_string(rep.r));
    }
    return rep;
}

std::size_t truncation_rank(const LoewnerPencil& pencil, double eps) {
    return truncation_report(pencil, eps).r;
}

RankRegularity check_rank_regularity(const LoewnerPencil& pencil, double rel_tol) {
    RankRegularity out;
    out.rank_row = numerical_rank(pencil.sv_row, rel_tol);
    out.rank_col = numerical_rank(pencil.sv_col, rel_tol);
    if (out.rank_row != out.rank_col) {
        out.regular = false;
        out.warnings.push_back("rank([L Ls]) = " + std::to_string(out.rank_row) + " differs from rank([L; Ls]) = " +
                               std::to_string(out.rank_col));
    }
    std::vector<PartitionPoint> pts = pencil.partition.left;
    pts.insert(pts.end(), pencil.partition.right.begin(), pencil.partition.right.end());
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    for (const auto& pt : pts) {
        const MatR shifted = pt.value * pencil.mats.L - pencil.mats.Ls;
        const std::size_t rk = matrix_rank(shifted, rel_tol);
        out.params.push_back(pt.value);
        out.rank_pencil.push_back(rk);
        if (rk != out.rank_row) {
            out.regular = false;
            std::ostringstream os;
            os << "rank(p L - Ls) = " << rk << " at p = " << pt.value << " differs from rank([L Ls]) = "
               << out.rank_row;
            out.warnings.push_back(os.str());
        }
    }
    return out;
}

ParametricRealization::ParametricRealization(SystemDims dims, MatR E, MatR A, MatR B, MatR C, MatR X,
                                             MatR Y)
    : dims_(dims), E_(std::move(E)), A_(std::move(A)), B_(std::move(B)), C_(std::move(C)),
      X_(std::move(X)), Y_(std::move(Y)) {
    const Eigen::Index r = E_.rows();
    auto expect = [](const MatR& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
        if (m.rows() != rows || m.cols() != cols) {
            throw std::invalid_argument(std::string("realization: ") + name + " is " +
                                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                        ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
        }
        if (!m.allFinite()) throw std::invalid_argument(std::string("realization: ") + name + " has non-finite entries");
    };
    expect(E_, r, r, "E");
    expect(A_, r, r, "A");
    expect(B_, r, dims_.n_i, "B");
    expect(C_, dims_.n_o, r, "C");
    expect(X_, r, dims_.n, "X");
    expect(Y_, dims_.n, r, "Y");
    XY_ = X_ * Y_;
}

ParametricRealization realize(const LoewnerPencil& pencil, std::size_t r) {
    const auto rr = static_cast<Eigen::Index>(r);
    if (r == 0 || rr > pencil.X.cols() || rr > pencil.Y.cols()) {
        throw std::invalid_argument("realize: truncation rank " + std::to_string(r) +
                                    " outside available singular vectors (1.." +
                                    std::to_string(std::min(pencil.X.cols(), pencil.Y.cols())) + ")");
    }
    const SystemDims& d = pencil.dims;
    const auto Xr = pencil.X.leftCols(rr);
    const auto Yr = pencil.Y.leftCols(rr);

    const MatR XtV = Xr.transpose() * pencil.mats.V; // r x (n + n_i) = [X B]
    const MatR WY = pencil.mats.W * Yr;              // (n + n_o) x r = [Y; C]
    const MatR LY = pencil.mats.L * Yr;
    const MatR LsY = pencil.mats.Ls * Yr;
    MatR E = -(Xr.transpose() * LY);
    MatR A = -(Xr.transpose() * LsY);

    return ParametricRealization(d, std::move(E), std::move(A), XtV.rightCols(d.n_i),
                                 WY.bottomRows(d.n_o), XtV.leftCols(d.n), WY.topRows(d.n));
}

MatR eval_G_hat(const ParametricRealization& real, double p) {
    const SystemDims& d = real.dims();
    const LuFactor<double> lu(real.K(p));
    if (lu.singular()) {
        std::ostringstream os;
        os << "K(p) = p E - A is singular at p = " << p;
        throw SingularMatrix(os.str());
    }
    MatR right(real.r(), d.n + d.n_i);
    right << real.X(), real.B();
    MatR left(d.n + d.n_o, real.r());
    left << real.Y(), real.C();
    return left * lu.solve(right);
}

} // namespace ploewner
