#include "ploewner/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace ploewner {

namespace {

std::string dims(const MatR& M) {
    std::ostringstream os;
    os << M.rows() << "x" << M.cols();
    return os.str();
}

// Divide-and-conquer SVD, with one-sided Jacobi as fallback when the
// bidiagonal solver reports a numerical issue.
template <typename Solver>
bool take(const Solver& f, unsigned options, VecR& sigma, MatR* U, MatR* Vt) {
    if (f.info() != Eigen::Success || !f.singularValues().allFinite()) return false;
    sigma = f.singularValues();
    if (options & Eigen::ComputeThinU) *U = f.matrixU();
    if (options & Eigen::ComputeThinV) *Vt = f.matrixV().transpose();
    return true;
}

bool run_svd(const MatR& M, unsigned options, VecR& sigma, MatR* U, MatR* Vt) {
    if (take(Eigen::BDCSVD<MatR>(M, options), options, sigma, U, Vt)) return true;
    return take(Eigen::JacobiSVD<MatR>(M, options), options, sigma, U, Vt);
}

template <typename Scalar>
double norm1_impl(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M) {
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename Scalar>
Scalar unit_sign(Scalar v) {
    if constexpr (std::is_same_v<Scalar, double>) {
        return v >= 0.0 ? 1.0 : -1.0;
    } else {
        const double a = std::abs(v);
        return a == 0.0 ? Scalar(1.0) : v / a;
    }
}

} // namespace

SvdResult svd(const MatR& M, SvdFactors factors) {
    if (!M.allFinite()) throw NumericalError("svd: non-finite entries in " + dims(M) + " matrix");
    SvdResult out;
    out.U = MatR(M.rows(), 0);
    out.Vt = MatR(0, M.cols());
    if (M.size() == 0) return out;
    unsigned options = 0;
    if (factors != SvdFactors::right) options |= Eigen::ComputeThinU;
    if (factors != SvdFactors::left) options |= Eigen::ComputeThinV;
    if (!run_svd(M, options, out.singular_values, &out.U, &out.Vt)) {
        throw NumericalError("svd: no convergence on " + dims(M) + " matrix");
    }
    return out;
}

VecR singular_values(const MatR& M) {
    if (!M.allFinite()) throw NumericalError("svd: non-finite entries in " + dims(M) + " matrix");
    VecR sigma;
    if (M.size() == 0) return sigma;
    if (!run_svd(M, 0, sigma, nullptr, nullptr)) {
        throw NumericalError("svd: no convergence on " + dims(M) + " matrix");
    }
    return sigma;
}

template <typename Scalar>
LuFactor<Scalar>::LuFactor(const Matrix& M) : n_(M.rows()) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("LU: matrix must be square, got " + std::to_string(M.rows()) +
                                    "x" + std::to_string(M.cols()));
    }
    norm1_ = norm1_impl<Scalar>(M);
    if (n_ == 0) return;
    lu_.compute(M);
    const auto diag = lu_.matrixLU().diagonal();
    for (Eigen::Index i = 0; i < n_; ++i) {
        const double a = std::abs(diag(i));
        if (a == 0.0 || !std::isfinite(a)) {
            singular_ = true;
            break;
        }
    }
}

template <typename Scalar>
auto LuFactor<Scalar>::solve(const Matrix& B) const -> Matrix {
    if (B.rows() != n_) {
        throw std::invalid_argument("LU solve: right-hand side has " + std::to_string(B.rows()) +
                                    " rows, expected " + std::to_string(n_));
    }
    if (singular_) throw SingularMatrix("LU solve: matrix is singular (zero pivot)");
    if (n_ == 0) return Matrix(0, B.cols());
    return lu_.solve(B);
}

template <typename Scalar>
auto LuFactor<Scalar>::solve_adjoint(const Matrix& B) const -> Matrix {
    if (B.rows() != n_) {
        throw std::invalid_argument("LU adjoint solve: right-hand side has " +
                                    std::to_string(B.rows()) + " rows, expected " +
                                    std::to_string(n_));
    }
    if (singular_) throw SingularMatrix("LU solve: matrix is singular (zero pivot)");
    if (n_ == 0) return Matrix(0, B.cols());
    return lu_.adjoint().solve(B);
}

// Hager's 1-norm power iteration with Higham's refinements (the scheme
// behind LAPACK xLACN2): at most five sweeps, plus the alternating-sign
// test vector that catches matrices where the iteration stalls.
template <typename Scalar>
double LuFactor<Scalar>::inverse_norm1_estimate() const {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    if (singular_) return std::numeric_limits<double>::infinity();
    if (n_ == 0) return 0.0;
    const double n = static_cast<double>(n_);

    Vec x = Vec::Constant(n_, Scalar(1.0 / n));
    Vec y = solve(x);
    double est = y.cwiseAbs().sum();
    if (n_ == 1) return est;

    Eigen::Index last_j = -1;
    for (int iter = 0; iter < 5; ++iter) {
        Vec xi(n_);
        for (Eigen::Index i = 0; i < n_; ++i) xi(i) = unit_sign(y(i));
        const Vec z = solve_adjoint(xi);
        Eigen::Index j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        const double zx = std::real(z.dot(x));
        if (zmax <= zx || j == last_j) break;
        x = Vec::Zero(n_);
        x(j) = Scalar(1.0);
        last_j = j;
        y = solve(x);
        const double next = y.cwiseAbs().sum();
        if (next <= est) break;
        est = next;
    }

    Vec alt(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
        const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
        alt(i) = Scalar(sgn * (1.0 + static_cast<double>(i) / (n - 1.0)));
    }
    const double alt_est = 2.0 * solve(alt).cwiseAbs().sum() / (3.0 * n);
    return std::max(est, alt_est);
}

template class LuFactor<double>;
template class LuFactor<Complex>;

MatC lu_solve(const MatC& M, const MatC& B) {
    return LuFactor<Complex>(M).solve(B);
}

MatR lu_solve(const MatR& M, const MatR& B) {
    return LuFactor<double>(M).solve(B);
}

double cond1_estimate(const MatC& M) {
    const LuFactor<Complex> lu(M);
    if (lu.singular()) return std::numeric_limits<double>::infinity();
    return lu.norm1() * lu.inverse_norm1_estimate();
}

double cond1_estimate(const MatR& M) {
    const LuFactor<double> lu(M);
    if (lu.singular()) return std::numeric_limits<double>::infinity();
    return lu.norm1() * lu.inverse_norm1_estimate();
}

std::size_t numerical_rank(std::span<const double> sigma, double rel_tol) {
    if (sigma.empty()) return 0;
    const double top = *std::max_element(sigma.begin(), sigma.end());
    if (top <= 0.0) return 0;
    const double cut = rel_tol * top;
    return static_cast<std::size_t>(
        std::count_if(sigma.begin(), sigma.end(), [cut](double s) { return s > cut; }));
}

std::size_t numerical_rank(const VecR& sigma, double rel_tol) {
    return numerical_rank(std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())),
                          rel_tol);
}

std::size_t matrix_rank(const MatR& M, double rel_tol) {
    if (M.size() == 0) return 0;
    return numerical_rank(singular_values(M), rel_tol);
}

double spectral_norm(const MatC& M) {
    if (M.size() == 0) return 0.0;
    if (M.size() == 1) return std::abs(M(0, 0));
    Eigen::BDCSVD<MatC> dec(M);
    return dec.singularValues()(0);
}

double spectral_norm(const MatR& M) {
    if (M.size() == 0) return 0.0;
    if (M.size() == 1) return std::abs(M(0, 0));
    return singular_values(M)(0);
}

double norm1(const MatC& M) { return norm1_impl<Complex>(M); }
double norm1(const MatR& M) { return norm1_impl<double>(M); }

} // namespace ploewner
