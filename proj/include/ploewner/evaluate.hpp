#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ploewner/loewner.hpp"
#include "ploewner/models.hpp"

namespace ploewner {

struct EvalConfig {
    double eps_cond = 1e6;   // switch threshold on the kappa_1 estimate of Z(s, p)
    double zero_s_tol = 0.0; // |s| <= zero_s_tol takes the Schur-complement path
};

enum class Formula { compact, precise, schur_zero };

std::string_view to_string(Formula f);

struct EvalResult {
    MatC value;               // n_o x n_i
    Formula formula = Formula::compact;
    double cond_estimate = 0; // kappa~ of Z(s,p); of K(p) on the s = 0 path
};

/// Raised by eval() when no formula produces a value.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// C (p E - s^-1 XY - A)^-1 B.
MatC eval_compact(const ParametricRealization& real, Complex s, double p);

/// s C (s p E - s A - XY)^-1 B, the same value without forming 1/s.
MatC eval_compact_inverse_free(const ParametricRealization& real, Complex s, double p);

/// C (K^-1 X (sI - Y K^-1 X)^-1 Y K^-1 + K^-1) B with K = K(p).
MatC eval_precise(const ParametricRealization& real, Complex s, double p);

/// Oblique projector P(p) = X (Y K^-1 X)^-1 Y K^-1 onto ran(X).
MatR oblique_projector(const ParametricRealization& real, double p);

/// H^(0, p) = C K^-1 (I - P(p)) B.
MatC eval_schur_zero(const ParametricRealization& real, double p);

/// Condition-switched evaluation: Schur path at s = 0, compact formula when
/// kappa~(Z) <= eps_cond, precise formula otherwise or when Z is singular.
EvalResult eval(const ParametricRealization& real, Complex s, double p, const EvalConfig& cfg = {});

struct ErrorCell {
    double delta = 0.0;               // NaN when the cell failed
    Formula formula = Formula::compact;
    double cond_estimate = 0.0;
    bool failed = false;
    std::string cause;
};

/// delta(omega, p) = || H^(i omega, p) - H(i omega, p) ||_2 on a grid.
/// cells are stored row-major with omega as the slow index.
struct ErrorGrid {
    std::vector<double> omegas;
    std::vector<double> params;
    std::vector<ErrorCell> cells;

    [[nodiscard]] const ErrorCell& at(std::size_t omega_idx, std::size_t param_idx) const {
        return cells[omega_idx * params.size() + param_idx];
    }
};

ErrorGrid error_grid(const ParametricRealization& real, const ParametricModel& model,
                     std::span<const double> omegas, std::span<const double> params,
                     const EvalConfig& cfg = {}, unsigned threads = 1);

} // namespace ploewner
