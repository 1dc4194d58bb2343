#include "ploewner/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ploewner/evaluate.hpp"
#include "ploewner/formats.hpp"
#include "ploewner/loewner.hpp"
#include "ploewner/models.hpp"
#include "ploewner/parallel.hpp"
#include "ploewner/rankbounds.hpp"

namespace ploewner::cli {

namespace {

using formats::fmt17;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

/// Input problem reported to the user with exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SourceArgs {
    std::string builtin;
    std::string model_path;
};

void add_source_options(CLI::App* cmd, SourceArgs& src) {
    auto* b = cmd->add_option("--builtin", src.builtin, "Built-in model (see builtin-list)");
    auto* m = cmd->add_option("--model", src.model_path, "Model manifest (JSON)");
    b->excludes(m);
}

formats::ModelSource load_source(const SourceArgs& src) {
    if (!src.builtin.empty()) {
        try {
            return {builtin(src.builtin), std::nullopt};
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }
    if (!src.model_path.empty()) return formats::load_model_manifest(src.model_path);
    throw InputError("specify a model with --builtin NAME or --model PATH");
}

ParametricModel require_coefficients(const formats::ModelSource& src, const char* why) {
    if (!src.model) {
        throw InputError(std::string("the model manifest holds snapshots only; ") + why +
                         " needs polynomial coefficients (gamma)");
    }
    return *src.model;
}

std::vector<double> uniform_from(const std::vector<std::string>& spec) {
    if (spec.size() != 3) throw InputError("--uniform expects min,max,count");
    try {
        const double lo = std::stod(spec[0]);
        const double hi = std::stod(spec[1]);
        const long count = std::stol(spec[2]);
        if (count < 1) throw InputError("--uniform count must be positive");
        return linspace(lo, hi, static_cast<std::size_t>(count));
    } catch (const std::logic_error&) {
        throw InputError("--uniform expects min,max,count");
    }
}

Complex parse_s(const std::vector<double>& s_parts, const std::optional<double>& omega) {
    if (omega) return {0.0, *omega};
    if (s_parts.empty()) throw InputError("specify --s RE[,IM] or --omega W");
    if (s_parts.size() > 2) throw InputError("--s expects RE or RE,IM");
    return {s_parts[0], s_parts.size() == 2 ? s_parts[1] : 0.0};
}

void print_matrix(std::ostream& out, const MatC& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            out << "value[" << i << "," << j << "]: " << fmt17(M(i, j).real()) << " " << fmt17(M(i, j).imag())
                << "\n";
        }
    }
}

json vec_json(const VecR& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// --- interpolate -----------------------------------------------------------

struct InterpolateArgs {
    SourceArgs src;
    std::vector<double> params;
    std::vector<std::string> uniform;
    std::vector<double> left, right;
    double eps = 1e-7;
    std::string out_dir;
    bool skip_regularity = false;
};

int cmd_interpolate(const InterpolateArgs& a, unsigned threads, std::ostream& out, std::ostream& err) {
    if (!(a.eps > 0.0 && a.eps < 1.0)) throw InputError("--eps must lie in (0, 1)");
    const formats::ModelSource src = load_source(a.src);

    std::vector<double> params = a.params;
    if (!a.uniform.empty()) {
        if (!params.empty()) throw InputError("use either --params or --uniform, not both");
        params = uniform_from(a.uniform);
    }
    const bool explicit_part = !a.left.empty() || !a.right.empty();
    if (explicit_part && (a.left.empty() || a.right.empty())) {
        throw InputError("an explicit partition needs both --left and --right");
    }

    std::optional<SnapshotSet> snaps;
    if (src.snapshots) {
        if (!params.empty()) throw InputError("the snapshot manifest fixes the parameters; drop --params/--uniform");
        snaps = *src.snapshots;
        params = snaps->params();
    } else {
        if (params.empty() && explicit_part) {
            params = a.left;
            params.insert(params.end(), a.right.begin(), a.right.end());
        }
        std::vector<double> distinct = params;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 2) throw InputError("need >= 2 distinct parameters");
        try {
            snaps = sample(*src.model, params);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }
    if (params.size() < 2) throw InputError("need >= 2 distinct parameters");

    Partition part;
    try {
        part = explicit_part ? explicit_partition(params, a.left, a.right) : alternating_partition(params);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }

    const auto t0 = std::chrono::steady_clock::now();
    const LoewnerPencil pencil = build_pencil(*snaps, part, threads);
    const TruncationReport trunc = truncation_report(pencil, a.eps);
    std::vector<std::string> warnings = trunc.warnings;

    json regularity;
    if (!a.skip_regularity) {
        const RankRegularity reg = check_rank_regularity(pencil);
        regularity = {{"rank_row", reg.rank_row},
                      {"rank_col", reg.rank_col},
                      {"params", reg.params},
                      {"rank_shifted_pencil", reg.rank_pencil},
                      {"regular", reg.regular}};
        warnings.insert(warnings.end(), reg.warnings.begin(), reg.warnings.end());
    }
    if (trunc.r == 0) throw InputError("all singular values vanish; nothing to interpolate");

    const ParametricRealization real = realize(pencil, trunc.r);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    formats::save_realization(a.out_dir, real);

    json manifest;
    manifest["r"] = trunc.r;
    manifest["eps"] = a.eps;
    manifest["truncation"] = {{"rule", "tail-energy"},
                              {"r", trunc.r},
                              {"r_col", trunc.r_col},
                              {"r_literal", trunc.r_literal},
                              {"cap", trunc.cap}};
    manifest["dims"] = {{"n", real.dims().n}, {"n_i", real.dims().n_i}, {"n_o", real.dims().n_o}};
    manifest["pencil_shape"] = {pencil.mats.L.rows(), pencil.mats.L.cols()};
    manifest["params"] = params;
    manifest["partition"] = formats::partition_json(part);
    manifest["singular_values"] = {{"row", vec_json(pencil.sv_row)}, {"col", vec_json(pencil.sv_col)}};
    if (!regularity.is_null()) manifest["rank_regularity"] = regularity;
    manifest["warnings"] = warnings;
    manifest["source"] = a.src.builtin.empty() ? json{{"model", a.src.model_path}} : json{{"builtin", a.src.builtin}};
    manifest["seconds"] = seconds;
    {
        std::ofstream mf(std::filesystem::path(a.out_dir) / "manifest.json");
        if (!mf) throw InputError("cannot write manifest in " + a.out_dir);
        mf << manifest.dump(2) << "\n";
    }

    for (const auto& w : warnings) err << "warning: " << w << "\n";
    out << "pencil: " << pencil.mats.L.rows() << "x" << pencil.mats.L.cols() << "\n";
    out << "r: " << trunc.r << "\n";
    out << "realization written to " << a.out_dir << "\n";
    return kExitOk;
}

// --- eval / true-eval ------------------------------------------------------

struct EvalArgs {
    std::string realization;
    std::vector<double> s;
    std::optional<double> omega;
    double p = 0.0;
    double eps_cond = 1e6;
    double zero_s_tol = 0.0;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    const ParametricRealization real = formats::load_realization(a.realization);
    const Complex s = parse_s(a.s, a.omega);
    EvalConfig cfg;
    cfg.eps_cond = a.eps_cond;
    cfg.zero_s_tol = a.zero_s_tol;
    try {
        const EvalResult res = eval(real, s, a.p, cfg);
        out << "formula: " << to_string(res.formula) << "\n";
        out << "cond_estimate: " << fmt17(res.cond_estimate) << "\n";
        print_matrix(out, res.value);
        return kExitOk;
    } catch (const EvaluationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

struct TrueEvalArgs {
    SourceArgs src;
    std::vector<double> s;
    std::optional<double> omega;
    double p = 0.0;
};

int cmd_true_eval(const TrueEvalArgs& a, std::ostream& out, std::ostream& err) {
    const ParametricModel model = require_coefficients(load_source(a.src), "true-eval");
    const Complex s = parse_s(a.s, a.omega);
    try {
        print_matrix(out, true_tf(model, s, a.p));
        return kExitOk;
    } catch (const SingularMatrix& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

// --- grid ------------------------------------------------------------------

struct GridArgs {
    std::string realization;
    SourceArgs src;
    OmegaGrid omega;
    std::string spacing = "log";
    std::vector<double> params;
    std::vector<std::string> uniform;
    double eps_cond = 1e6;
    std::string out_csv;
};

int cmd_grid(const GridArgs& a, unsigned threads, std::ostream& out, std::ostream& err) {
    const ParametricRealization real = formats::load_realization(a.realization);
    const ParametricModel model = require_coefficients(load_source(a.src), "an error grid");
    OmegaGrid og = a.omega;
    if (a.spacing != "log" && a.spacing != "linear") throw InputError("--omega-spacing must be log or linear");
    og.log_spacing = a.spacing == "log";
    if (og.count == 0) throw InputError("--omega-count must be positive");
    if (og.log_spacing && (og.min <= 0.0 || og.max <= 0.0)) throw InputError("log spacing needs positive omega bounds");
    std::vector<double> params = a.params;
    if (!a.uniform.empty()) {
        if (!params.empty()) throw InputError("use either --params or --uniform, not both");
        params = uniform_from(a.uniform);
    }
    if (params.empty()) throw InputError("specify parameters with --params or --uniform");
    const std::vector<double> omegas = expand(og);

    EvalConfig cfg;
    cfg.eps_cond = a.eps_cond;
    const ErrorGrid grid = error_grid(real, model, omegas, params, cfg, threads);

    std::ostream* csv = &out;
    std::ofstream file;
    if (!a.out_csv.empty()) {
        file.open(a.out_csv);
        if (!file) throw InputError("cannot write " + a.out_csv);
        csv = &file;
    }
    formats::write_error_grid_csv(*csv, grid);

    std::vector<double> deltas;
    std::size_t failed = 0;
    std::size_t precise = 0;
    for (const auto& c : grid.cells) {
        if (c.failed) {
            ++failed;
            continue;
        }
        deltas.push_back(c.delta);
        if (c.formula == Formula::precise) ++precise;
    }
    std::ostream& summary = a.out_csv.empty() ? err : out;
    if (deltas.empty()) {
        summary << "summary: every cell failed (" << failed << ")\n";
        return kExitFailure;
    }
    std::sort(deltas.begin(), deltas.end());
    const std::size_t m = deltas.size();
    const double median = m % 2 ? deltas[m / 2] : 0.5 * (deltas[m / 2 - 1] + deltas[m / 2]);
    summary << "summary: cells=" << grid.cells.size() << " max_delta=" << fmt17(deltas.back())
            << " median_delta=" << fmt17(median)
            << " precise_fraction=" << fmt17(static_cast<double>(precise) / static_cast<double>(m))
            << " failed=" << failed << "\n";
    return kExitOk;
}

// --- ranks -----------------------------------------------------------------

struct RanksArgs {
    SourceArgs src;
    std::vector<double> left, right;
    std::string out_json;
};

int cmd_ranks(const RanksArgs& a, std::ostream& out, std::ostream& err) {
    const ParametricModel model = require_coefficients(load_source(a.src), "rank bounds");
    if (a.left.empty() || a.right.empty()) throw InputError("ranks needs --left and --right points");
    std::vector<double> params = a.left;
    params.insert(params.end(), a.right.begin(), a.right.end());
    Partition part;
    try {
        part = explicit_partition(params, a.left, a.right);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const RankReport rep = model.degree() == 1 ? affine_bounds(model, part) : poly_bounds(model, part);
    const json j = formats::rank_report_json(rep);
    out << j.dump(2) << "\n";
    if (!a.out_json.empty()) {
        std::ofstream f(a.out_json);
        if (!f) throw InputError("cannot write " + a.out_json);
        f << j.dump(2) << "\n";
    }
    if (!rep.ok()) {
        err << "rank bound violated\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_builtin_list(std::ostream& out) {
    for (const auto& name : builtin_names()) {
        const ParametricModel m = builtin(name);
        out << name << "  n=" << m.dims().n << " n_i=" << m.dims().n_i << " n_o=" << m.dims().n_o
            << " degree=" << m.degree() << "\n";
    }
    return kExitOk;
}

} // namespace

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t k = 0; k < count; ++k) {
        v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    if (count > 1) v.back() = hi;
    return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
    std::vector<double> v = linspace(std::log10(lo), std::log10(hi), count);
    for (double& x : v) x = std::pow(10.0, x);
    return v;
}

std::vector<double> expand(const OmegaGrid& g) {
    return g.log_spacing ? logspace(g.min, g.max, g.count) : linspace(g.min, g.max, g.count);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Parametric Loewner interpolation of state-space snapshots"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = default_thread_count();
    app.add_option("--threads", threads, "Worker threads (default: PLOEWNER_THREADS or hardware)")
        ->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("builtin-list", "List built-in models");

    InterpolateArgs ia;
    auto* interp = app.add_subcommand("interpolate", "Build a parametric realization from snapshots");
    add_source_options(interp, ia.src);
    interp->add_option("--params", ia.params, "Parameter samples")->delimiter(',');
    interp->add_option("--uniform", ia.uniform, "min,max,count uniform samples")->delimiter(',')->expected(3);
    interp->add_option("--left", ia.left, "Explicit left points")->delimiter(',');
    interp->add_option("--right", ia.right, "Explicit right points")->delimiter(',');
    interp->add_option("--eps", ia.eps, "Truncation tolerance")->capture_default_str();
    interp->add_option("-o,--out", ia.out_dir, "Output realization directory")->required();
    interp->add_flag("--no-regularity-check", ia.skip_regularity, "Skip the rank(pL - Ls) check");

    EvalArgs ea;
    auto* ev = app.add_subcommand("eval", "Evaluate the interpolated transfer function");
    ev->add_option("realization", ea.realization, "Realization directory")->required();
    ev->add_option("--s", ea.s, "Complex frequency RE[,IM]")->delimiter(',');
    ev->add_option("--omega", ea.omega, "Frequency in rad/s (s = i omega)");
    ev->add_option("--p", ea.p, "Parameter")->required();
    ev->add_option("--eps-cond", ea.eps_cond, "Condition-estimate switch threshold")->capture_default_str();
    ev->add_option("--zero-s-tol", ea.zero_s_tol, "|s| below which the s = 0 formula is used");

    TrueEvalArgs ta;
    auto* tev = app.add_subcommand("true-eval", "Evaluate the reference transfer function");
    add_source_options(tev, ta.src);
    tev->add_option("--s", ta.s, "Complex frequency RE[,IM]")->delimiter(',');
    tev->add_option("--omega", ta.omega, "Frequency in rad/s (s = i omega)");
    tev->add_option("--p", ta.p, "Parameter")->required();

    GridArgs ga;
    auto* grid = app.add_subcommand("grid", "Error grid against a reference model");
    grid->add_option("realization", ga.realization, "Realization directory")->required();
    add_source_options(grid, ga.src);
    grid->add_option("--omega-min", ga.omega.min)->capture_default_str();
    grid->add_option("--omega-max", ga.omega.max)->capture_default_str();
    grid->add_option("--omega-count", ga.omega.count)->capture_default_str();
    grid->add_option("--omega-spacing", ga.spacing, "log or linear")->capture_default_str();
    grid->add_option("--params", ga.params, "Parameter values")->delimiter(',');
    grid->add_option("--uniform", ga.uniform, "min,max,count uniform parameters")->delimiter(',')->expected(3);
    grid->add_option("--eps-cond", ga.eps_cond)->capture_default_str();
    grid->add_option("-o,--out", ga.out_csv, "CSV output (stdout when omitted)");

    RanksArgs ra;
    auto* ranks = app.add_subcommand("ranks", "Check Loewner rank bounds");
    add_source_options(ranks, ra.src);
    ranks->add_option("--left", ra.left, "Left points")->delimiter(',');
    ranks->add_option("--right", ra.right, "Right points")->delimiter(',');
    ranks->add_option("-o,--out", ra.out_json, "Also write the JSON report here");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("ploewner");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*list) return cmd_builtin_list(out);
        if (*interp) return cmd_interpolate(ia, threads, out, err);
        if (*ev) return cmd_eval(ea, out, err);
        if (*tev) return cmd_true_eval(ta, out, err);
        if (*grid) return cmd_grid(ga, threads, out, err);
        if (*ranks) return cmd_ranks(ra, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const formats::FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitInput;
}

} // namespace ploewner::cli
