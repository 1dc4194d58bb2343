#include "ploewner/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ploewner {

namespace {

std::string shape(const MatR& M) {
    return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

// A(p) = [-2 p 0; -p -1 0; 0 0 -1], B = (1 0 1)^T, C = B^T, D = 0.
ParametricModel make_toy(bool modified) {
    MatR g0(4, 4);
    g0 << -2, 0, 0, 1,
           0, -1, 0, 0,
           0, 0, -1, 1,
           1, 0, 1, 0;
    MatR g1 = MatR::Zero(4, 4);
    g1(0, 1) = 1;
    g1(1, 0) = -1;
    if (modified) {
        // A(3,3) = -p instead of -1.
        g0(2, 2) = 0;
        g1(2, 2) = -1;
    }
    return ParametricModel({3, 1, 1}, {g0, g1});
}

// Cubic system. B is taken as the constant (1, 0.5, 1)^T.
ParametricModel make_polynomial() {
    MatR g0(4, 4);
    g0 << -2, 0, 0, 1,
           0, -1, 0, 0.5,
           0, 0, -1, 1,
           1, 0, 1, 0;
    MatR g1(4, 4);
    g1 <<  0, -1, 0, 0,
          -1, 0, -0.5, 0,
           0, -0.5, 0, 0,
           0, 0, 0, 0;
    MatR g2(4, 4);
    g2 << 0.1, 0, 0.2, 0,
          0, 1, 0, 0,
         -0.2, 0, 0, 0,
          0, 0, 0, 0;
    MatR g3(4, 4);
    g3 <<  0, 1, 0, 0,
          -1, 0, 0, 0,
           0, -10, 0, 0,
           0, 0, 0, 0;
    return ParametricModel({3, 1, 1}, {g0, g1, g2, g3});
}

// A(p) = diag(A1(p), A2, A3, A4) with A1(p) = [-1 p; -p -1],
// A2 = [-1 200; -200 -1], A3 = [-1 400; -400 -1], A4 = -diag(1..1000),
// B^T = C = (10 x6, 1 x1000).
ParametricModel make_penzl() {
    constexpr Eigen::Index n = 1006;
    MatR g0 = MatR::Zero(n + 1, n + 1);
    MatR g1 = MatR::Zero(n + 1, n + 1);
    const double rot[3] = {0.0, 200.0, 400.0};
    for (int b = 0; b < 3; ++b) {
        const Eigen::Index i = 2 * b;
        g0(i, i) = -1.0;
        g0(i + 1, i + 1) = -1.0;
        g0(i, i + 1) = rot[b];
        g0(i + 1, i) = -rot[b];
    }
    g1(0, 1) = 1.0;
    g1(1, 0) = -1.0;
    for (Eigen::Index k = 0; k < 1000; ++k) g0(6 + k, 6 + k) = -static_cast<double>(k + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = i < 6 ? 10.0 : 1.0;
        g0(i, n) = w;
        g0(n, i) = w;
    }
    return ParametricModel({n, 1, 1}, {g0, g1});
}

} // namespace

ParametricModel::ParametricModel(SystemDims dims, std::vector<MatR> gamma)
    : dims_(dims), gamma_(std::move(gamma)) {
    if (dims_.n < 0 || dims_.n_i < 1 || dims_.n_o < 1) {
        throw std::invalid_argument("ParametricModel: need n >= 0 and at least one input and output");
    }
    if (gamma_.empty()) throw std::invalid_argument("ParametricModel: no coefficient matrices");
    for (std::size_t k = 0; k < gamma_.size(); ++k) {
        const MatR& g = gamma_[k];
        if (g.rows() != dims_.block_rows() || g.cols() != dims_.block_cols()) {
            throw std::invalid_argument("ParametricModel: gamma[" + std::to_string(k) + "] is " +
                                        shape(g) + ", expected " +
                                        std::to_string(dims_.block_rows()) + "x" +
                                        std::to_string(dims_.block_cols()));
        }
        if (!g.allFinite()) {
            throw std::invalid_argument("ParametricModel: gamma[" + std::to_string(k) +
                                        "] has non-finite entries");
        }
    }
    if (gamma_.size() > 1 && gamma_.back().isZero(0.0)) {
        throw std::invalid_argument("ParametricModel: leading coefficient gamma[" +
                                    std::to_string(gamma_.size() - 1) + "] is identically zero");
    }
}

MatR ParametricModel::eval_G(double p) const {
    if (!std::isfinite(p)) throw std::invalid_argument("eval_G: parameter must be finite");
    MatR acc = gamma_.back();
    for (std::size_t k = gamma_.size() - 1; k-- > 0;) {
        acc *= p;
        acc += gamma_[k];
    }
    return acc;
}

SnapshotSet::SnapshotSet(SystemDims dims, std::vector<Snapshot> snapshots)
    : dims_(dims), snapshots_(std::move(snapshots)) {
    for (std::size_t i = 0; i < snapshots_.size(); ++i) {
        const Snapshot& s = snapshots_[i];
        if (!std::isfinite(s.p)) {
            throw std::invalid_argument("SnapshotSet: parameter " + std::to_string(i) + " is not finite");
        }
        if (s.G.rows() != dims_.block_rows() || s.G.cols() != dims_.block_cols()) {
            throw std::invalid_argument("SnapshotSet: snapshot " + std::to_string(i) + " is " +
                                        shape(s.G) + ", expected " +
                                        std::to_string(dims_.block_rows()) + "x" +
                                        std::to_string(dims_.block_cols()));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (snapshots_[j].p == s.p) {
                std::ostringstream os;
                os << "SnapshotSet: duplicate parameter value " << s.p << " (snapshots " << j
                   << " and " << i << ")";
                throw std::invalid_argument(os.str());
            }
        }
    }
}

std::vector<double> SnapshotSet::params() const {
    std::vector<double> out;
    out.reserve(snapshots_.size());
    for (const auto& s : snapshots_) out.push_back(s.p);
    return out;
}

StateSpaceBlocks split_blocks(const MatR& G, const SystemDims& d) {
    if (G.rows() != d.block_rows() || G.cols() != d.block_cols()) {
        throw std::invalid_argument("split_blocks: matrix is " + shape(G) + ", expected " +
                                    std::to_string(d.block_rows()) + "x" +
                                    std::to_string(d.block_cols()));
    }
    return {G.topLeftCorner(d.n, d.n), G.topRightCorner(d.n, d.n_i),
            G.bottomLeftCorner(d.n_o, d.n), G.bottomRightCorner(d.n_o, d.n_i)};
}

MatR assemble_blocks(const StateSpaceBlocks& b) {
    const Eigen::Index n = b.A.rows();
    if (b.A.cols() != n || b.B.rows() != n || b.C.cols() != n || b.D.rows() != b.C.rows() ||
        b.D.cols() != b.B.cols()) {
        throw std::invalid_argument("assemble_blocks: inconsistent block shapes");
    }
    MatR G(n + b.C.rows(), n + b.B.cols());
    G << b.A, b.B, b.C, b.D;
    return G;
}

StateSpaceBlocks eval_blocks(const ParametricModel& model, double p) {
    return split_blocks(model.eval_G(p), model.dims());
}

Snapshot snapshot(const ParametricModel& model, double p) {
    return {p, model.eval_G(p)};
}

SnapshotSet sample(const ParametricModel& model, std::span<const double> params) {
    std::vector<Snapshot> snaps;
    snaps.reserve(params.size());
    for (double p : params) snaps.push_back(snapshot(model, p));
    return SnapshotSet(model.dims(), std::move(snaps));
}

MatC snapshot_tf(const MatR& G, const SystemDims& d, Complex s) {
    const StateSpaceBlocks b = split_blocks(G, d);
    MatC resolvent = -b.A.cast<Complex>();
    resolvent.diagonal().array() += s;
    try {
        const MatC x = lu_solve(resolvent, b.B.cast<Complex>());
        return b.C.cast<Complex>() * x + b.D.cast<Complex>();
    } catch (const SingularMatrix&) {
        std::ostringstream os;
        os << "transfer function: sI - A is singular at s = " << s;
        throw SingularMatrix(os.str());
    }
}

MatC true_tf(const ParametricModel& model, Complex s, double p) {
    return snapshot_tf(model.eval_G(p), model.dims(), s);
}

std::vector<std::string> builtin_names() {
    return {"toy", "toy_modified", "polynomial", "penzl"};
}

ParametricModel builtin(std::string_view name) {
    if (name == "toy") return make_toy(false);
    if (name == "toy_modified") return make_toy(true);
    if (name == "polynomial") return make_polynomial();
    if (name == "penzl") return make_penzl();
    std::string valid;
    for (const auto& n : builtin_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown builtin model '" + std::string(name) + "' (valid: " + valid + ")");
}

} // namespace ploewner
