#pragma once

#include <utility>
#include <vector>

#include "ploewner/loewner.hpp"
#include "ploewner/models.hpp"

namespace ploewner {

/// Block matrix with (i, j) block equal to
///   (pi_i^k - phi_j^k) / (pi_i - phi_j) * ones(block_rows, block_cols),
/// evaluated as sum_{m<k} pi_i^m phi_j^(k-1-m).
MatR xi_matrix(std::size_t k, const Partition& part, Eigen::Index block_rows, Eigen::Index block_cols);

/// The M x N scalar core of xi_matrix; rank(xi_matrix) equals rank(core).
MatR xi_core(std::size_t k, const Partition& part);

/// Comparison of actual Loewner pencil ranks against the bounds
///   rank(L)  <= sum_k rank(Gamma_k) rank(Xi_k)
///   rank(Ls) <= sum_k rank(Gamma_k) rank(Xi_{k+1}).
struct RankReport {
    std::size_t rank_L = 0;
    std::size_t rank_Ls = 0;
    std::vector<std::size_t> rank_gamma; // k = 0..h
    std::vector<std::size_t> rank_xi;    // k = 0..h+1
    std::size_t bound_L = 0;
    std::size_t bound_Ls = 0;
    std::pair<bool, bool> holds{false, false};
    /// Affine models only: rank(L) == rank(Gamma_1).
    bool affine = false;
    bool affine_equality = false;

    [[nodiscard]] bool ok() const { return holds.first && holds.second && (!affine || affine_equality); }
};

/// Affine bounds (degree 1 only); the L bound is the equality rank(Gamma_1).
RankReport affine_bounds(const ParametricModel& model, const Partition& part,
                         double rel_tol = kDefaultRankTol);

/// Polynomial bounds for any degree.
RankReport poly_bounds(const ParametricModel& model, const Partition& part,
                       double rel_tol = kDefaultRankTol);

} // namespace ploewner
