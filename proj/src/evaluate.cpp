#include "ploewner/evaluate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ploewner/parallel.hpp"

namespace ploewner {

namespace {

std::string where(Complex s, double p) {
    std::ostringstream os;
    os.precision(17);
    os << "(s = " << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i, p = " << p << ")";
    return os.str();
}

MatC form_Z(const ParametricRealization& real, Complex s, double p) {
    MatC Z = real.K(p).cast<Complex>();
    Z -= real.XY().cast<Complex>() / s;
    return Z;
}

LuFactor<double> factor_K(const ParametricRealization& real, double p) {
    LuFactor<double> lu(real.K(p));
    if (lu.singular()) {
        std::ostringstream os;
        os.precision(17);
        os << "K(p) = p E - A is singular at p = " << p;
        throw SingularMatrix(os.str());
    }
    return lu;
}

} // namespace

std::string_view to_string(Formula f) {
    switch (f) {
    case Formula::compact: return "compact";
    case Formula::precise: return "precise";
    case Formula::schur_zero: return "schur_zero";
    }
    return "unknown";
}

MatC eval_compact(const ParametricRealization& real, Complex s, double p) {
    if (s == Complex(0.0)) throw std::invalid_argument("compact formula requires s != 0");
    const LuFactor<Complex> lu(form_Z(real, s, p));
    if (lu.singular()) throw SingularMatrix("Z(s,p) is singular at " + where(s, p));
    return real.C().cast<Complex>() * lu.solve(real.B().cast<Complex>());
}

MatC eval_compact_inverse_free(const ParametricRealization& real, Complex s, double p) {
    MatC S = (s * p) * real.E().cast<Complex>();
    S -= s * real.A().cast<Complex>();
    S -= real.XY().cast<Complex>();
    const LuFactor<Complex> lu(S);
    if (lu.singular()) throw SingularMatrix("s p E - s A - XY is singular at " + where(s, p));
    return s * (real.C().cast<Complex>() * lu.solve(real.B().cast<Complex>()));
}

MatC eval_precise(const ParametricRealization& real, Complex s, double p) {
    const LuFactor<double> luK = factor_K(real, p);
    const MatR KX = luK.solve(real.X()); // r x n
    const MatR KB = luK.solve(real.B()); // r x n_i
    const MatR Ahat = real.Y() * KX;     // n x n
    const MatR Bhat = real.Y() * KB;     // n x n_i

    MatC resolvent = -Ahat.cast<Complex>();
    resolvent.diagonal().array() += s;
    const LuFactor<Complex> luR(resolvent);
    if (luR.singular()) throw SingularMatrix("sI - Y K(p)^-1 X is singular at " + where(s, p));
    const MatC inner = KX.cast<Complex>() * luR.solve(Bhat.cast<Complex>()) + KB.cast<Complex>();
    return real.C().cast<Complex>() * inner;
}

MatR oblique_projector(const ParametricRealization& real, double p) {
    const LuFactor<double> luK = factor_K(real, p);
    // Y K^-1 = (K^-T Y^T)^T
    const MatR YKinv = luK.solve_adjoint(real.Y().transpose()).transpose(); // n x r
    const LuFactor<double> luS(YKinv * real.X());
    if (luS.singular()) {
        std::ostringstream os;
        os.precision(17);
        os << "Y K(p)^-1 X is singular at p = " << p;
        throw SingularMatrix(os.str());
    }
    return real.X() * luS.solve(YKinv);
}

MatC eval_schur_zero(const ParametricRealization& real, double p) {
    const MatR P = oblique_projector(real, p);
    const LuFactor<double> luK = factor_K(real, p);
    const MatR residual = real.B() - P * real.B(); // (I - P) B
    return (real.C() * luK.solve(residual)).cast<Complex>();
}

EvalResult eval(const ParametricRealization& real, Complex s, double p, const EvalConfig& cfg) {
    EvalResult out;
    if (std::abs(s) <= cfg.zero_s_tol) {
        out.formula = Formula::schur_zero;
        try {
            out.cond_estimate = cond1_estimate(real.K(p));
            out.value = eval_schur_zero(real, p);
        } catch (const std::exception& e) {
            throw EvaluationError("evaluation failed at " + where(s, p) + ": " + e.what());
        }
        return out;
    }

    const LuFactor<Complex> luZ(form_Z(real, s, p));
    std::string compact_cause;
    if (luZ.singular()) {
        out.cond_estimate = std::numeric_limits<double>::infinity();
        compact_cause = "Z(s,p) is singular";
    } else {
        out.cond_estimate = luZ.norm1() * luZ.inverse_norm1_estimate();
        if (out.cond_estimate <= cfg.eps_cond) {
            out.formula = Formula::compact;
            out.value = real.C().cast<Complex>() * luZ.solve(real.B().cast<Complex>());
            return out;
        }
    }

    try {
        out.formula = Formula::precise;
        out.value = eval_precise(real, s, p);
        return out;
    } catch (const std::exception& e) {
        if (!compact_cause.empty()) {
            throw EvaluationError("evaluation failed at " + where(s, p) + ": compact: " + compact_cause +
                                  "; precise: " + e.what());
        }
        // Z is invertible but the precise route broke down; the compact
        // value is the only one left.
        out.formula = Formula::compact;
        out.value = real.C().cast<Complex>() * luZ.solve(real.B().cast<Complex>());
        return out;
    }
}

ErrorGrid error_grid(const ParametricRealization& real, const ParametricModel& model,
                     std::span<const double> omegas, std::span<const double> params,
                     const EvalConfig& cfg, unsigned threads) {
    if (omegas.empty() || params.empty()) throw std::invalid_argument("error_grid: empty frequency or parameter grid");
    for (double w : omegas) {
        if (!std::isfinite(w)) throw std::invalid_argument("error_grid: non-finite frequency");
    }
    for (double p : params) {
        if (!std::isfinite(p)) throw std::invalid_argument("error_grid: non-finite parameter");
    }
    if (!(real.dims() == model.dims())) {
        throw std::invalid_argument("error_grid: realization and reference model have different dimensions");
    }

    ErrorGrid grid;
    grid.omegas.assign(omegas.begin(), omegas.end());
    grid.params.assign(params.begin(), params.end());
    grid.cells.resize(omegas.size() * params.size());

    std::vector<MatR> G(params.size());
    for (std::size_t j = 0; j < params.size(); ++j) G[j] = model.eval_G(params[j]);

    parallel_for(grid.cells.size(), threads, [&](std::size_t idx) {
        const std::size_t i = idx / params.size();
        const std::size_t j = idx % params.size();
        const Complex s(0.0, omegas[i]);
        ErrorCell& cell = grid.cells[idx];
        try {
            const EvalResult res = eval(real, s, params[j], cfg);
            cell.formula = res.formula;
            cell.cond_estimate = res.cond_estimate;
            const MatC truth = snapshot_tf(G[j], model.dims(), s);
            cell.delta = spectral_norm(MatC(res.value - truth));
            if (!std::isfinite(cell.delta)) {
                cell.failed = true;
                cell.cause = "non-finite transfer function value";
                cell.delta = std::numeric_limits<double>::quiet_NaN();
            }
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.cause = e.what();
            cell.delta = std::numeric_limits<double>::quiet_NaN();
        }
    });
    return grid;
}

} // namespace ploewner
