#pragma once

#include <span>
#include <string>
#include <vector>

#include "ploewner/models.hpp"
#include "ploewner/numkit.hpp"

namespace ploewner {

struct PartitionPoint {
    std::size_t index = 0; // position in the snapshot set
    double value = 0.0;
};

/// Disjoint split of the samples into left points (pi) and right points (phi).
struct Partition {
    std::vector<PartitionPoint> left;
    std::vector<PartitionPoint> right;

    [[nodiscard]] std::vector<double> left_values() const;
    [[nodiscard]] std::vector<double> right_values() const;
};

/// Sorts the samples ascending and sends positions 1, 3, 5, ... (1-based)
/// left and 2, 4, ... right. Indices refer to the order of `params`.
Partition alternating_partition(std::span<const double> params);

/// Partition given by explicit left / right values, each matched exactly to
/// one entry of `params`. Every sample must be used exactly once.
Partition explicit_partition(std::span<const double> params, std::span<const double> left,
                             std::span<const double> right);

/// Throws std::invalid_argument unless the partition covers samples
/// 0..n_samples-1 exactly once, both sides are nonempty, and no left value
/// equals a right value.
void validate_partition(const Partition& part, std::size_t n_samples);

/// Loewner and shifted Loewner matrices plus the data matrices V, W.
struct LoewnerMatrices {
    MatR L;  // M*(n+n_o) x N*(n+n_i)
    MatR Ls;
    MatR V;  // G(pi_1); ...; G(pi_M) stacked vertically
    MatR W;  // [G(phi_1) ... G(phi_N)]
};

/// Blockwise assembly. Blocks are written into disjoint regions, so fills
/// may run concurrently (`threads` > 1).
LoewnerMatrices assemble_loewner(const SnapshotSet& snapshots, const Partition& part,
                                 unsigned threads = 1);

/// Loewner pencil with both SVDs:
///   [L Ls] = X S1 Y~^T  and  [L; Ls] = X~ S2 Y^T.
/// Only the economy factors X (left, row pencil) and Y (right, column
/// pencil) are retained.
struct LoewnerPencil {
    SystemDims dims;
    Partition partition;
    LoewnerMatrices mats;
    VecR sv_row; // singular values of [L Ls]
    VecR sv_col; // singular values of [L; Ls]
    MatR X;
    MatR Y;
};

LoewnerPencil build_pencil(const SnapshotSet& snapshots, const Partition& part, unsigned threads = 1);

/// Smallest r with sqrt(sum_{i>r} s_i^2 / sum_i s_i^2) <= eps, where s are
/// the given singular values.
std::size_t tail_energy_rank(const VecR& sigma, double eps);

/// Truncation rule as literally printed: smallest k with
/// eps <= sqrt(sum_{i<k} s_i^2 / sum_i s_i^2). Kept for diagnostics only.
std::size_t literal_rule_rank(const VecR& sigma, double eps);

struct TruncationReport {
    std::size_t r = 0;         // chosen rank
    std::size_t r_col = 0;     // same rule applied to sv_col
    std::size_t r_literal = 0; // literal rule on sv_row
    std::size_t cap = 0;       // numerical_rank(sv_row, 1e-12)
    std::vector<std::string> warnings;
};

TruncationReport truncation_report(const LoewnerPencil& pencil, double eps);

/// Tail-energy rank on sv_row, capped at numerical_rank(sv_row, 1e-12).
std::size_t truncation_rank(const LoewnerPencil& pencil, double eps);

struct RankRegularity {
    std::size_t rank_row = 0;
    std::size_t rank_col = 0;
    std::vector<double> params;
    std::vector<std::size_t> rank_pencil; // rank(p L - Ls) per sample p
    bool regular = true;
    std::vector<std::string> warnings;
};

/// Checks rank(p L - Ls) = rank([L Ls]) = rank([L; Ls]) for every sample p.
RankRegularity check_rank_regularity(const LoewnerPencil& pencil, double rel_tol = kDefaultRankTol);

/// Truncated parametric realization (E, A, B, C, X, Y) with
///   K(p) = Xr^T (Ls - p L) Yr = p E - A,
///   G^(p) = [Y; C] K(p)^-1 [X B].
class ParametricRealization {
public:
    ParametricRealization(SystemDims dims, MatR E, MatR A, MatR B, MatR C, MatR X, MatR Y);

    [[nodiscard]] const SystemDims& dims() const { return dims_; }
    [[nodiscard]] Eigen::Index r() const { return E_.rows(); }
    [[nodiscard]] const MatR& E() const { return E_; }
    [[nodiscard]] const MatR& A() const { return A_; }
    [[nodiscard]] const MatR& B() const { return B_; }
    [[nodiscard]] const MatR& C() const { return C_; }
    [[nodiscard]] const MatR& X() const { return X_; }
    [[nodiscard]] const MatR& Y() const { return Y_; }
    /// Product X * Y (r x r), formed once at construction.
    [[nodiscard]] const MatR& XY() const { return XY_; }

    [[nodiscard]] MatR K(double p) const { return p * E_ - A_; }

private:
    SystemDims dims_;
    MatR E_, A_, B_, C_, X_, Y_, XY_;
};

/// Projects the pencil onto the leading r singular vectors.
ParametricRealization realize(const LoewnerPencil& pencil, std::size_t r);

/// G^(p); throws SingularMatrix naming p when K(p) is singular.
MatR eval_G_hat(const ParametricRealization& real, double p);

} // namespace ploewner
