#pragma once

// Dense linear algebra used throughout ploewner.
//
// Storage order: every MatR / MatC is column-major (Eigen default). Entry
// (i, j) of an m x n matrix lives at linear offset i + j * m. All binary
// matrix files written by this project use the same order.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ploewner {

using Complex = std::complex<double>;
using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using MatC = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using VecR = Eigen::VectorXd;

/// Raised when an LU factorization meets an exactly zero pivot.
class SingularMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative decomposition fails to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SvdResult {
    MatR U;                 // rows x k, orthonormal columns
    VecR singular_values;   // k = min(rows, cols), nonincreasing
    MatR Vt;                // k x cols, orthonormal rows
};

/// Which singular vectors svd() returns; the other factor is left empty.
enum class SvdFactors { both, left, right };

/// Economy SVD M = U diag(sigma) Vt by divide and conquer (Jacobi as
/// fallback). Throws NumericalError when neither converges.
SvdResult svd(const MatR& M, SvdFactors factors = SvdFactors::both);

/// Singular values only; same drivers as svd().
VecR singular_values(const MatR& M);

/// LU factorization with partial pivoting. Works for real and complex
/// square matrices; singularity means an exactly zero pivot.
template <typename Scalar>
class LuFactor {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    explicit LuFactor(const Matrix& M);

    [[nodiscard]] bool singular() const { return singular_; }
    [[nodiscard]] Eigen::Index size() const { return n_; }
    /// 1-norm of the factored matrix.
    [[nodiscard]] double norm1() const { return norm1_; }

    /// Solves M X = B. Throws SingularMatrix if the factorization is singular.
    [[nodiscard]] Matrix solve(const Matrix& B) const;
    /// Solves M^H X = B.
    [[nodiscard]] Matrix solve_adjoint(const Matrix& B) const;

    /// Estimate of ||M^-1||_1 (Hager / Higham power iteration). +inf when
    /// singular.
    [[nodiscard]] double inverse_norm1_estimate() const;

private:
    Eigen::PartialPivLU<Matrix> lu_;
    Eigen::Index n_ = 0;
    double norm1_ = 0.0;
    bool singular_ = false;
};

extern template class LuFactor<double>;
extern template class LuFactor<Complex>;

/// X with M X = B via LU with partial pivoting.
MatC lu_solve(const MatC& M, const MatC& B);
MatR lu_solve(const MatR& M, const MatR& B);

/// kappa_1 estimate ||M||_1 * est(||M^-1||_1). +inf when M is exactly singular.
double cond1_estimate(const MatC& M);
double cond1_estimate(const MatR& M);

/// Number of singular values strictly above rel_tol * sigma_1.
std::size_t numerical_rank(std::span<const double> singular_values, double rel_tol = 1e-10);
std::size_t numerical_rank(const VecR& singular_values, double rel_tol = 1e-10);

/// Rank of a matrix via its singular values.
std::size_t matrix_rank(const MatR& M, double rel_tol = 1e-10);

/// Largest singular value (2-norm).
double spectral_norm(const MatC& M);
double spectral_norm(const MatR& M);

double norm1(const MatC& M);
double norm1(const MatR& M);

inline constexpr double kDefaultRankTol = 1e-10;

} // namespace ploewner
