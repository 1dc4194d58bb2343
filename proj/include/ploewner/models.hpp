#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ploewner/numkit.hpp"

namespace ploewner {

/// Shape of a realization (A, B, C, D): state order n, inputs n_i, outputs n_o.
struct SystemDims {
    Eigen::Index n = 0;
    Eigen::Index n_i = 0;
    Eigen::Index n_o = 0;

    [[nodiscard]] Eigen::Index block_rows() const { return n + n_o; }
    [[nodiscard]] Eigen::Index block_cols() const { return n + n_i; }
    bool operator==(const SystemDims&) const = default;
};

struct StateSpaceBlocks {
    MatR A, B, C, D;
};

/// Parametric LTI model with polynomial dependence
///   G(p) = [A(p) B(p); C(p) D(p)] = sum_k p^k * gamma[k].
/// Immutable once constructed.
class ParametricModel {
public:
    ParametricModel(SystemDims dims, std::vector<MatR> gamma);

    [[nodiscard]] const SystemDims& dims() const { return dims_; }
    [[nodiscard]] std::size_t degree() const { return gamma_.size() - 1; }
    [[nodiscard]] const std::vector<MatR>& gamma() const { return gamma_; }

    /// G(p) by Horner's scheme.
    [[nodiscard]] MatR eval_G(double p) const;

private:
    SystemDims dims_;
    std::vector<MatR> gamma_;
};

struct Snapshot {
    double p = 0.0;
    MatR G;
};

/// Snapshots G(p_i) sharing one shape, with pairwise distinct p_i.
class SnapshotSet {
public:
    SnapshotSet(SystemDims dims, std::vector<Snapshot> snapshots);

    [[nodiscard]] const SystemDims& dims() const { return dims_; }
    [[nodiscard]] std::size_t size() const { return snapshots_.size(); }
    [[nodiscard]] const Snapshot& operator[](std::size_t i) const { return snapshots_[i]; }
    [[nodiscard]] const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    [[nodiscard]] std::vector<double> params() const;

private:
    SystemDims dims_;
    std::vector<Snapshot> snapshots_;
};

StateSpaceBlocks split_blocks(const MatR& G, const SystemDims& dims);
MatR assemble_blocks(const StateSpaceBlocks& blocks);

StateSpaceBlocks eval_blocks(const ParametricModel& model, double p);
Snapshot snapshot(const ParametricModel& model, double p);
SnapshotSet sample(const ParametricModel& model, std::span<const double> params);

/// H(s, p) = C(p) (sI - A(p))^-1 B(p) + D(p). Throws SingularMatrix when s
/// is an eigenvalue of A(p).
MatC true_tf(const ParametricModel& model, Complex s, double p);
/// Same, from an already-assembled snapshot matrix.
MatC snapshot_tf(const MatR& G, const SystemDims& dims, Complex s);

/// Names accepted by builtin().
std::vector<std::string> builtin_names();

/// Built-in benchmark systems: "toy", "toy_modified", "polynomial", "penzl".
ParametricModel builtin(std::string_view name);

} // namespace ploewner
