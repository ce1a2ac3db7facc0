// bhk: command-line front end for the unit-ball heat-kernel library.
//
// Subcommands: eval, sweep, check, calibrate, integral. Every run prints one
// JSON line on stdout. Exit codes: 0 success, 1 a checked bound or
// calibration failed, 2 usage or domain error, 3 accuracy error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bhk/bounds.hpp"
#include "bhk/integrals.hpp"
#include "bhk/kernels.hpp"
#include "bhk/monte_carlo.hpp"
#include "bhk/report.hpp"
#include "bhk/series.hpp"
#include "bhk/sweep.hpp"

namespace {

using json = nlohmann::json;
using namespace bhk;

enum ExitCode { kOk = 0, kBoundFailure = 1, kUsage = 2, kAccuracy = 3 };

/// Effective settings: defaults, then the --config file, then flags.
struct CliConfig {
    std::optional<int> dimension;
    RegimeConfig regime;
    SeriesConfig series;
    McConfig mc;
    std::string out;
    std::string format = "json";

    void validate() const {
        if (dimension && *dimension < 2) throw UsageError("dimension must be >= 2");
        regime.validate();
        series.validate();
        mc.validate();
        if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
    }

    Fields fields() const {
        return {{"cli.dimension", std::int64_t(dimension.value_or(0))},
                {"cli.M_thm1", regime.M_thm1},
                {"cli.m2_thm2", regime.m2_thm2},
                {"cli.m1_time", regime.m1_time},
                {"cli.rho_interior", regime.rho_interior},
                {"cli.series_tail_tol", series.tail_tol},
                {"cli.series_max_radial_modes", std::int64_t(series.max_radial_modes)},
                {"cli.series_max_angular_modes", std::int64_t(series.max_angular_modes)},
                {"cli.mc_paths", std::int64_t(mc.n_paths)},
                {"cli.mc_seed", std::int64_t(mc.seed)},
                {"cli.mc_dt", mc.dt},
                {"cli.format", format}};
    }
};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw UsageError("config: '" + where + "' must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw UsageError("config: unknown key '" + (where.empty() ? "" : where + ".") + key + "'");
}

template <class T>
void read_key(const json& obj, const char* key, T& dst) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config: key '") + key + "' has the wrong type");
    }
}

void load_config_file(const std::string& path, CliConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    reject_unknown(j, {"dimension", "regime", "series", "mc", "output"}, "");
    if (j.contains("dimension")) {
        int d = 0;
        read_key(j, "dimension", d);
        cfg.dimension = d;
    }
    if (j.contains("regime")) {
        const json& r = j["regime"];
        reject_unknown(r, {"M_thm1", "m2_thm2", "m1_time", "rho_interior"}, "regime");
        read_key(r, "M_thm1", cfg.regime.M_thm1);
        read_key(r, "m2_thm2", cfg.regime.m2_thm2);
        read_key(r, "m1_time", cfg.regime.m1_time);
        read_key(r, "rho_interior", cfg.regime.rho_interior);
    }
    if (j.contains("series")) {
        const json& s = j["series"];
        reject_unknown(s, {"tail_tol", "max_radial_modes", "max_angular_modes"}, "series");
        read_key(s, "tail_tol", cfg.series.tail_tol);
        read_key(s, "max_radial_modes", cfg.series.max_radial_modes);
        read_key(s, "max_angular_modes", cfg.series.max_angular_modes);
    }
    if (j.contains("mc")) {
        const json& m = j["mc"];
        reject_unknown(m, {"n_paths", "seed", "dt"}, "mc");
        read_key(m, "n_paths", cfg.mc.n_paths);
        read_key(m, "seed", cfg.mc.seed);
        read_key(m, "dt", cfg.mc.dt);
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        reject_unknown(o, {"path", "format"}, "output");
        read_key(o, "path", cfg.out);
        read_key(o, "format", cfg.format);
    }
}

/// Flags shared by every subcommand. Values stay unset unless given, so
/// they override the config file only when present.
struct CommonFlags {
    std::string config;
    std::optional<int> dimension;
    std::optional<double> M_thm1, m2_thm2, m1_time, rho_interior, tail_tol, mc_dt;
    std::optional<std::size_t> max_radial, max_angular;
    std::optional<std::uint64_t> mc_paths, mc_seed;
    std::optional<std::string> out, format;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "JSON config file");
        app->add_option("--dimension", dimension, "Space dimension");
        app->add_option("--M-thm1", M_thm1, "Theorem 1 threshold on delta(mid)/sqrt(t)");
        app->add_option("--m2-thm2", m2_thm2, "Theorem 2 threshold on delta(mid)/sqrt(t)");
        app->add_option("--m1-time", m1_time, "Theorem 2 time threshold");
        app->add_option("--rho-interior", rho_interior, "Interior threshold on rho^2/t");
        app->add_option("--tail-tol", tail_tol, "Series relative tail tolerance");
        app->add_option("--max-radial-modes", max_radial, "Series radial mode cap");
        app->add_option("--max-angular-modes", max_angular, "Series angular mode cap");
        app->add_option("--paths", mc_paths, "Monte Carlo paths");
        app->add_option("--mc-seed", mc_seed, "Monte Carlo seed");
        app->add_option("--mc-dt", mc_dt, "Monte Carlo minimum step (0 = t/2048)");
        app->add_option("--out", out, "Report file");
        app->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    }

    /// Applies the config file and then the flags on top of `cfg`, which
    /// holds the command's defaults.
    CliConfig resolve(CliConfig cfg = {}) const {
        if (!config.empty()) load_config_file(config, cfg);
        if (dimension) cfg.dimension = dimension;
        if (M_thm1) cfg.regime.M_thm1 = *M_thm1;
        if (m2_thm2) cfg.regime.m2_thm2 = *m2_thm2;
        if (m1_time) cfg.regime.m1_time = *m1_time;
        if (rho_interior) cfg.regime.rho_interior = *rho_interior;
        if (tail_tol) cfg.series.tail_tol = *tail_tol;
        if (max_radial) cfg.series.max_radial_modes = *max_radial;
        if (max_angular) cfg.series.max_angular_modes = *max_angular;
        if (mc_paths) cfg.mc.n_paths = *mc_paths;
        if (mc_seed) cfg.mc.seed = *mc_seed;
        if (mc_dt) cfg.mc.dt = *mc_dt;
        if (out) cfg.out = *out;
        if (format) cfg.format = *format;
        cfg.validate();
        return cfg;
    }
};

Point parse_point(const std::string& text, const char* flag) {
    std::vector<double> coords;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v))
            throw UsageError(std::string("malformed coordinates for ") + flag + ": '" + text + "'");
        coords.push_back(v);
    }
    if (coords.size() < 2) throw UsageError(std::string(flag) + " needs at least two coordinates");
    return Point(std::move(coords));
}

void add_config_echo(Report& rep, const CliConfig& cfg) {
    for (auto& f : cfg.fields()) rep.config.push_back(std::move(f));
}

void write_report(const Report& rep, const CliConfig& cfg, json& line) {
    if (cfg.out.empty()) return;
    const std::string text = emit_report(rep, cfg.format);
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw UsageError("cannot write report to '" + cfg.out + "'");
    f << text;
    if (!f) throw UsageError("failed writing report to '" + cfg.out + "'");
    line["out"] = cfg.out;
}

json cell_json(const Cell& c) {
    return std::visit([](const auto& v) { return json(v); }, c);
}

json fields_json(const Fields& fs) {
    json j = json::object();
    for (const auto& [k, v] : fs) j[k] = cell_json(v);
    return j;
}

// eval --------------------------------------------------------------------

struct EvalArgs {
    double t = 0.0;
    std::string x, y;
    std::string method = "auto";
    std::string variant = "exponential";
    std::string halfspace = "chord";
};

int cmd_eval(const EvalArgs& a, const CliConfig& cfg) {
    if (!(a.t > 0.0)) throw UsageError("--t must be > 0");
    const Point x = parse_point(a.x, "--x"), y = parse_point(a.y, "--y");
    x.check_dim(y);
    if (cfg.dimension && std::size_t(*cfg.dimension) != x.dim())
        throw UsageError("--x and --y have dimension " + std::to_string(x.dim()) + " but the config says " +
                         std::to_string(*cfg.dimension));
    delta_ball(x);
    delta_ball(y);

    json line;
    line["command"] = "eval";
    line["method"] = a.method;
    line["t"] = a.t;
    std::optional<double> err;
    KernelEstimate e;
    if (a.method == "auto") {
        SeriesConfig s = cfg.series;
        e = kernel_eval(a.t, x, y, cfg.regime, s);
    } else if (a.method == "thm1") {
        e = thm1_approx(a.t, x, y);
    } else if (a.method == "thm2") {
        e = thm2_approx(a.t, x, y, a.variant == "linear" ? Thm2Variant::linear : Thm2Variant::exponential);
    } else if (a.method == "vdb") {
        e.value = vdb_lower_bound(a.t, x, y);
        e.regime = Regime::interior;
        e.error_indicator = vdb_correction(a.t, x, y);
    } else if (a.method == "halfspace") {
        const HalfSpace H = a.halfspace == "tangent" ? tangent_halfspace(x) : chord_halfspace(x, y);
        e.value = halfspace_kernel(a.t, x, y, H);
        e.regime = Regime::thm2_boundary;
        e.error_indicator = std::numeric_limits<double>::quiet_NaN();
    } else if (a.method == "gauss") {
        e.value = gauss_kernel(a.t, x, y);
        e.regime = Regime::interior;
        e.error_indicator = vdb_correction(a.t, x, y);
    } else if (a.method == "series" || a.method == "mc") {
        OracleResult o;
        if (a.method == "series") {
            SeriesConfig s = cfg.series;
            s.dimension = int(x.dim());
            o = series_kernel(a.t, x, y, s);
        } else {
            o = mc_kernel(a.t, x, y, cfg.mc);
        }
        e.value = o.value;
        e.regime = regime_select(a.t, x, y, cfg.regime);
        e.error_indicator = o.value != 0.0 ? o.err / std::abs(o.value) : o.err;
        err = o.err;
    }
    line["value"] = e.value;
    line["regime"] = std::string(regime_name(e.regime));
    line["error_indicator"] = std::isfinite(e.error_indicator) ? json(e.error_indicator) : json(nullptr);
    if (err) line["err"] = *err;

    Report rep;
    rep.kind = "eval";
    rep.config = {{"method", a.method}, {"t", a.t}, {"x", a.x}, {"y", a.y}};
    add_config_echo(rep, cfg);
    rep.columns = {"value", "regime", "error_indicator"};
    rep.add_row({e.value, std::string(regime_name(e.regime)), e.error_indicator});
    write_report(rep, cfg, line);
    std::cout << line.dump() << '\n';
    return kOk;
}

// sweep -------------------------------------------------------------------

struct SweepArgs {
    std::string family;
    int theorem = 1;
    std::string variant = "exponential";
    std::string oracle = "series";
    std::optional<double> t_min, t_max;
    std::size_t points = 12;
    std::optional<double> depth, separation, exponent, scale;
    double ceiling = 10.0;
};

int cmd_sweep(SweepArgs a, const CliConfig& cfg) {
    SweepSpec s;
    if (a.family.empty()) a.family = a.theorem == 1 ? "diagonal" : "midpoint";
    s.family = a.family == "chord"      ? PathFamily::chord
               : a.family == "midpoint" ? PathFamily::midpoint_scaling
                                        : PathFamily::diagonal;
    s.approximant = a.theorem == 1          ? Approximant::thm1
                    : a.variant == "linear" ? Approximant::thm2_linear
                                            : Approximant::thm2_exponential;
    s.oracle = a.oracle == "mc" ? OracleKind::monte_carlo : OracleKind::series;
    s.dimension = cfg.dimension.value_or(2);
    s.regime = cfg.regime;
    s.series = cfg.series;
    s.mc = cfg.mc;
    if (s.family == PathFamily::chord) s.depth = 0.1;
    if (a.depth) s.depth = *a.depth;
    if (a.separation) s.separation = *a.separation;
    if (a.exponent) s.exponent = *a.exponent;
    if (a.scale) s.scale = *a.scale;

    double lo = 1e-5, hi = 1e-2;
    if (s.family == PathFamily::chord) lo = 2e-4;
    if (s.approximant != Approximant::thm1) hi = 1e-3;
    if (a.t_min) lo = *a.t_min;
    if (a.t_max) hi = *a.t_max;
    if (!(lo > 0.0 && hi > lo)) throw UsageError("need 0 < --t-min < --t-max");
    s.t_grid = log_grid(lo, hi, a.points);

    const RateFit fit = run_rate_sweep(s);
    Report rep = rate_fit_report(s, fit);
    add_config_echo(rep, cfg);
    rep.config.push_back({"envelope_ceiling", a.ceiling});
    const bool pass = std::isfinite(fit.envelope_C) && fit.envelope_C <= a.ceiling;

    json line;
    line["command"] = "sweep";
    line["family"] = std::string(family_name(s.family));
    line["approximant"] = std::string(approximant_name(s.approximant));
    line["summary"] = fields_json(rep.summary);
    line["envelope_ceiling"] = a.ceiling;
    line["pass"] = pass;
    write_report(rep, cfg, line);
    std::cout << line.dump() << '\n';
    return pass ? kOk : kBoundFailure;
}

// check -------------------------------------------------------------------

struct CheckArgs {
    std::vector<std::string> suites;
    std::size_t cases = 1000;
    std::uint64_t seed = 1;
};

int cmd_check(const CheckArgs& a, const CliConfig& cfg) {
    std::vector<std::string> suites;
    for (const auto& s : a.suites)
        if (s != "all") suites.push_back(s);
    const std::vector<BoundResult> results = run_bound_suite(a.seed, a.cases, suites);
    Report rep = bound_report(results, a.seed, a.cases);
    add_config_echo(rep, cfg);

    json line;
    line["command"] = "check";
    line["summary"] = fields_json(rep.summary);
    json rows = json::array();
    bool pass = true;
    for (const auto& r : results) {
        pass = pass && r.pass;
        rows.push_back({{"suite", r.name},
                        {"fitted", r.fitted},
                        {"ceiling", r.ceiling},
                        {"pass", r.pass},
                        {"n_cases", r.n_cases},
                        {"n_violations", r.n_violations},
                        {"n_flagged", r.n_flagged}});
    }
    line["results"] = rows;
    write_report(rep, cfg, line);
    std::cout << line.dump() << '\n';
    return pass ? kOk : kBoundFailure;
}

// calibrate ---------------------------------------------------------------

int cmd_calibrate(double target, const CliConfig& cfg) {
    const CalibrationResult res = calibrate_regimes(target, cfg.series);
    Report rep = res.report;
    add_config_echo(rep, cfg);

    json line;
    line["command"] = "calibrate";
    line["summary"] = fields_json(rep.summary);
    line["grid_hash"] = std::to_string(res.grid_hash);
    write_report(rep, cfg, line);
    std::cout << line.dump() << '\n';
    return res.ok ? kOk : kBoundFailure;
}

// integral ----------------------------------------------------------------

struct IntegralArgs {
    double t = 0.0, a = 0.0, b = 0.0, alpha = 1.5, beta = 1.5, tol = 1e-10;
};

int cmd_integral(const IntegralArgs& a, const CliConfig& cfg) {
    const LogValue I = log_inverse_gamma_conv_integral(a.t, a.a, a.b, a.alpha, a.beta, a.tol);
    const double log_shape = log_estints_shape(a.t, a.a, a.b, a.alpha, a.beta);

    Report rep;
    rep.kind = "integral";
    rep.config = {{"t", a.t}, {"a", a.a}, {"b", a.b}, {"alpha", a.alpha}, {"beta", a.beta}, {"tol", a.tol}};
    add_config_echo(rep, cfg);
    rep.columns = {"value", "log_value", "rel_err", "shape", "ratio"};
    rep.add_row({std::exp(I.log_value), I.log_value, I.rel_err, std::exp(log_shape), std::exp(I.log_value - log_shape)});

    json line;
    line["command"] = "integral";
    line["value"] = std::exp(I.log_value);
    line["log_value"] = I.log_value;
    line["rel_err"] = I.rel_err;
    line["shape"] = std::exp(log_shape);
    line["ratio"] = std::exp(I.log_value - log_shape);
    write_report(rep, cfg, line);
    std::cout << line.dump() << '\n';
    return kOk;
}

int fail(const std::string& command, int code, const std::string& message) {
    std::cerr << "bhk: " << message << '\n';
    json line;
    line["command"] = command;
    line["error"] = message;
    line["exit_code"] = code;
    std::cout << line.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet heat kernel of the unit ball: approximants, oracles and experiments"};
    app.require_subcommand(1);

    CommonFlags eval_flags, sweep_flags, check_flags, calib_flags, integral_flags;

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate one kernel value");
    eval->add_option("--t", eval_args.t, "Time")->required();
    eval->add_option("--x", eval_args.x, "First point, comma-separated")->required();
    eval->add_option("--y", eval_args.y, "Second point, comma-separated")->required();
    eval->add_option("--method", eval_args.method, "Evaluation method")
        ->check(CLI::IsMember({"auto", "thm1", "thm2", "vdb", "halfspace", "gauss", "series", "mc"}));
    eval->add_option("--variant", eval_args.variant, "Theorem 2 form")->check(CLI::IsMember({"exponential", "linear"}));
    eval->add_option("--halfspace", eval_args.halfspace, "Half-space for --method halfspace")
        ->check(CLI::IsMember({"chord", "tangent"}));
    eval_flags.attach(eval);

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Rate sweep of an approximant against an oracle");
    sweep->add_option("--family", sweep_args.family, "Path family")
        ->check(CLI::IsMember({"diagonal", "chord", "midpoint"}));
    sweep->add_option("--theorem", sweep_args.theorem, "Approximant: 1 or 2")->check(CLI::IsMember({1, 2}));
    sweep->add_option("--variant", sweep_args.variant, "Theorem 2 form")->check(CLI::IsMember({"exponential", "linear"}));
    sweep->add_option("--oracle", sweep_args.oracle, "Reference oracle")->check(CLI::IsMember({"series", "mc"}));
    sweep->add_option("--t-min", sweep_args.t_min, "Smallest time");
    sweep->add_option("--t-max", sweep_args.t_max, "Largest time");
    sweep->add_option("--points", sweep_args.points, "Log-spaced grid points");
    sweep->add_option("--depth", sweep_args.depth, "delta(x) = delta(y) on the diagonal and chord paths");
    sweep->add_option("--separation", sweep_args.separation, "|x - y| on the chord path");
    sweep->add_option("--exponent", sweep_args.exponent, "delta = scale t^exponent on the midpoint path");
    sweep->add_option("--scale", sweep_args.scale, "delta = scale t^exponent on the midpoint path");
    sweep->add_option("--ceiling", sweep_args.ceiling, "Largest acceptable envelope_C");
    sweep_flags.attach(sweep);

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check", "Randomized bound suites");
    std::vector<std::string> suite_choices = bound_suite_names();
    suite_choices.push_back("all");
    check->add_option("--suite", check_args.suites, "Suite name (repeatable; default all)")
        ->check(CLI::IsMember(suite_choices));
    check->add_option("--cases", check_args.cases, "Cases per randomized suite")->check(CLI::PositiveNumber);
    check->add_option("--seed", check_args.seed, "Seed");
    check_flags.attach(check);

    double target = 0.2;
    CLI::App* calibrate = app.add_subcommand("calibrate", "Calibrate regime thresholds to a target error");
    calibrate->add_option("--target", target, "Target relative error in (0, 1)");
    calib_flags.attach(calibrate);

    IntegralArgs integral_args;
    CLI::App* integral = app.add_subcommand("integral", "Inverse-gamma convolution integral and its shape");
    integral->add_option("--t", integral_args.t, "Time")->required();
    integral->add_option("--a", integral_args.a, "a > 0")->required();
    integral->add_option("--b", integral_args.b, "b > 0")->required();
    integral->add_option("--alpha", integral_args.alpha, "alpha >= 3/2");
    integral->add_option("--beta", integral_args.beta, "beta >= 3/2");
    integral->add_option("--tol", integral_args.tol, "Relative tolerance");
    integral_flags.attach(integral);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "eval") return cmd_eval(eval_args, eval_flags.resolve());
        if (command == "sweep") {
            // Sweep thresholds describe the experiment's hypothesis region and
            // default wide enough for the standard grids.
            CliConfig base;
            base.regime.M_thm1 = 1.0;
            base.regime.m2_thm2 = 0.6;
            base.series = sweep_series_defaults();
            return cmd_sweep(sweep_args, sweep_flags.resolve(base));
        }
        if (command == "check") return cmd_check(check_args, check_flags.resolve());
        if (command == "calibrate") {
            CliConfig base;
            base.series = sweep_series_defaults();
            return cmd_calibrate(target, calib_flags.resolve(base));
        }
        if (command == "integral") return cmd_integral(integral_args, integral_flags.resolve());
    } catch (const AccuracyError& e) {
        return fail(command, kAccuracy, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(command, kUsage, e.what());
    } catch (const std::domain_error& e) {
        return fail(command, kUsage, e.what());
    } catch (const std::exception& e) {
        return fail(command, kAccuracy, e.what());
    }
    return fail(command, kUsage, "unknown command");
}
