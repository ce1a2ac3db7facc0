#pragma once

// Convergence-rate sweeps of the boundary approximants against an oracle,
// log-log rate fits, and calibration of the regime thresholds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bhk/error.hpp"
#include "bhk/geometry.hpp"
#include "bhk/kernels.hpp"
#include "bhk/monte_carlo.hpp"
#include "bhk/numeric.hpp"
#include "bhk/report.hpp"
#include "bhk/series.hpp"

namespace bhk {

enum class PathFamily {
    diagonal,          // x = y = (1 - depth) e1
    chord,             // delta(x) = delta(y) = depth, |x - y| = separation
    midpoint_scaling,  // x = y, delta = scale * t^exponent
};
enum class Approximant { thm1, thm2_exponential, thm2_linear };
enum class OracleKind { series, monte_carlo };

inline std::string_view family_name(PathFamily f) {
    switch (f) {
        case PathFamily::diagonal: return "diagonal";
        case PathFamily::chord: return "chord";
        case PathFamily::midpoint_scaling: return "midpoint-scaling";
    }
    return "unknown";
}
inline std::string_view approximant_name(Approximant a) {
    switch (a) {
        case Approximant::thm1: return "thm1";
        case Approximant::thm2_exponential: return "thm2-exponential";
        case Approximant::thm2_linear: return "thm2-linear";
    }
    return "unknown";
}

inline SeriesConfig sweep_series_defaults() {
    SeriesConfig s;
    s.max_radial_modes = 4000;
    s.max_angular_modes = 4000;
    return s;
}

struct SweepSpec {
    PathFamily family = PathFamily::diagonal;
    int dimension = 2;
    Approximant approximant = Approximant::thm1;
    OracleKind oracle = OracleKind::series;
    std::vector<double> t_grid;
    double depth = 0.2;
    double separation = 0.1;
    double exponent = 0.6;
    double scale = 1.0;
    // Hypothesis region every grid point must satisfy.
    RegimeConfig regime;
    SeriesConfig series = sweep_series_defaults();
    McConfig mc;

    /// x and y at grid time t.
    std::pair<Point, Point> points(double t) const {
        std::vector<double> x(std::size_t(dimension), 0.0), y(std::size_t(dimension), 0.0);
        switch (family) {
            case PathFamily::diagonal: x[0] = y[0] = 1.0 - depth; break;
            case PathFamily::chord: {
                const double rad = 1.0 - depth;
                const double s = separation / (2.0 * rad);
                if (!(s <= 1.0)) throw UsageError("SweepSpec: separation too large for the depth");
                const double c = std::sqrt((1.0 - s) * (1.0 + s));
                x[0] = y[0] = rad * c;
                x[1] = rad * s;
                y[1] = -rad * s;
                break;
            }
            case PathFamily::midpoint_scaling: x[0] = y[0] = 1.0 - scale * std::pow(t, exponent); break;
        }
        return {Point(std::move(x)), Point(std::move(y))};
    }

    /// Theorem rate expression at grid time t.
    double control(double t) const {
        const auto [x, y] = points(t);
        const double dmid = midpoint_delta(x, y);
        if (approximant == Approximant::thm1) return std::sqrt(std::sqrt(t) / dmid);
        return std::sqrt(t) + std::sqrt(dmid / std::sqrt(t));
    }

    void validate() const {
        if (dimension < 2) throw UsageError("SweepSpec: dimension must be >= 2");
        if (oracle == OracleKind::series && dimension != 2 && dimension != 3)
            throw UsageError("SweepSpec: the series oracle needs dimension 2 or 3");
        if (t_grid.size() < 8) throw UsageError("SweepSpec: the grid needs at least 8 points");
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            if (!(t_grid[i] > 0.0)) throw UsageError("SweepSpec: grid times must be > 0");
            if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw UsageError("SweepSpec: grid must be strictly increasing");
        }
        if (std::log10(t_grid.back() / t_grid.front()) < 1.5)
            throw UsageError("SweepSpec: grid must span at least 1.5 decades");
        if (!(depth > 0.0 && depth < 1.0)) throw UsageError("SweepSpec: depth must lie in (0, 1)");
        regime.validate();
        series.validate();
        mc.validate();
        for (double t : t_grid) {
            const auto [x, y] = points(t);
            if (!(x.norm() < 1.0) || !(x.norm() > 0.0) || !(y.norm() < 1.0))
                throw UsageError("SweepSpec: grid point outside the punctured open ball");
            const double ratio = midpoint_delta(x, y) / std::sqrt(t);
            const bool inside = approximant == Approximant::thm1
                                    ? ratio > regime.M_thm1
                                    : (t < regime.m1_time && ratio < regime.m2_thm2);
            if (!inside)
                throw UsageError("SweepSpec: grid point t = " + detail::format_double(t) +
                                 " lies outside the approximant's regime (delta_mid/sqrt(t) = " +
                                 detail::format_double(ratio) + ")");
        }
    }
};

struct SweepRecord {
    double t = 0.0;
    double delta_x = 0.0;
    double delta_y = 0.0;
    double separation = 0.0;
    double delta_mid = 0.0;
    double ratio = 0.0;  // delta_mid / sqrt(t)
    double control = 0.0;
    double approx = 0.0;
    double oracle = 0.0;
    double oracle_err = 0.0;
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    bool flagged = false;
    std::string note;
};

struct RateFit {
    std::vector<SweepRecord> records;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double envelope_C = std::numeric_limits<double>::quiet_NaN();
    double predicted_exponent = 1.0;
    std::size_t n_fit = 0;
    std::size_t n_flagged = 0;
    bool monotone = false;
};

/// Least-squares slope of log e against log u over records with e > 0,
/// after dropping the points with the smallest and largest u.
inline double fit_log_slope(std::vector<std::pair<double, double>> ue, std::size_t* used = nullptr) {
    std::erase_if(ue, [](const auto& p) { return !(p.first > 0.0) || !(p.second > 0.0); });
    std::sort(ue.begin(), ue.end());
    if (ue.size() >= 4) ue = std::vector<std::pair<double, double>>(ue.begin() + 1, ue.end() - 1);
    if (used) *used = ue.size();
    if (ue.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = double(ue.size());
    for (const auto& [u, e] : ue) {
        const double lx = std::log(u), ly = std::log(e);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = m * sxx - sx * sx;
    return den > 0.0 ? (m * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
}

inline RateFit run_rate_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t n = spec.t_grid.size();
    std::vector<SweepRecord> rec(n);
    double min_u = std::numeric_limits<double>::infinity();
    for (double t : spec.t_grid) min_u = std::min(min_u, spec.control(t));
    const double oracle_rel_limit = 0.1 * min_u;

    parallel_for(n, [&](std::size_t i) {
        const double t = spec.t_grid[i];
        const auto [x, y] = spec.points(t);
        SweepRecord& r = rec[i];
        r.t = t;
        r.delta_x = delta_ball(x);
        r.delta_y = delta_ball(y);
        r.separation = distance(x, y);
        r.delta_mid = midpoint_delta(x, y);
        r.ratio = r.delta_mid / std::sqrt(t);
        r.control = spec.control(t);
        switch (spec.approximant) {
            case Approximant::thm1: r.approx = thm1_approx(t, x, y).value; break;
            case Approximant::thm2_exponential: r.approx = thm2_approx(t, x, y, Thm2Variant::exponential).value; break;
            case Approximant::thm2_linear: r.approx = thm2_approx(t, x, y, Thm2Variant::linear).value; break;
        }
        try {
            OracleResult o;
            if (spec.oracle == OracleKind::series) {
                SeriesConfig sc = spec.series;
                sc.dimension = spec.dimension;
                o = series_kernel(t, x, y, sc);
            } else {
                o = mc_kernel(t, x, y, spec.mc);
            }
            r.oracle = o.value;
            r.oracle_err = o.err;
            if (!(o.value > 0.0) || o.err > oracle_rel_limit * o.value) {
                r.flagged = true;
                r.note = "oracle error above a tenth of the smallest rate";
            } else {
                r.rel_err = std::abs(r.approx - o.value) / o.value;
            }
        } catch (const AccuracyError& e) {
            r.flagged = true;
            r.note = e.what();
        }
    });

    RateFit fit;
    fit.records = rec;
    fit.predicted_exponent = 1.0;
    std::vector<std::pair<double, double>> ue;
    double env = 0.0;
    for (const auto& r : rec) {
        if (r.flagged) {
            ++fit.n_flagged;
            continue;
        }
        ue.emplace_back(r.control, r.rel_err);
        env = std::max(env, r.rel_err / std::pow(r.control, fit.predicted_exponent));
    }
    fit.envelope_C = ue.empty() ? std::numeric_limits<double>::quiet_NaN() : env;
    fit.slope = fit_log_slope(ue, &fit.n_fit);

    // Errors must not grow as t shrinks, up to the oracle's own uncertainty.
    fit.monotone = !ue.empty();
    const SweepRecord* prev = nullptr;
    for (const auto& r : rec) {
        if (r.flagged) continue;
        if (prev) {
            const double tol = (1.0 + prev->rel_err) * prev->oracle_err / prev->oracle +
                               (1.0 + r.rel_err) * r.oracle_err / r.oracle +
                               8.0 * std::numeric_limits<double>::epsilon();
            if (prev->rel_err > r.rel_err + tol) fit.monotone = false;
        }
        prev = &r;
    }
    return fit;
}

inline Report rate_fit_report(const SweepSpec& spec, const RateFit& fit) {
    Report rep;
    rep.kind = "rate_sweep";
    rep.config = {{"family", std::string(family_name(spec.family))},
                  {"dimension", std::int64_t(spec.dimension)},
                  {"approximant", std::string(approximant_name(spec.approximant))},
                  {"oracle", std::string(spec.oracle == OracleKind::series ? "series" : "mc")},
                  {"depth", spec.depth},
                  {"separation", spec.separation},
                  {"exponent", spec.exponent},
                  {"scale", spec.scale},
                  {"t_min", spec.t_grid.front()},
                  {"t_max", spec.t_grid.back()},
                  {"n_points", std::int64_t(spec.t_grid.size())},
                  {"M_thm1", spec.regime.M_thm1},
                  {"m2_thm2", spec.regime.m2_thm2},
                  {"m1_time", spec.regime.m1_time},
                  {"series_tail_tol", spec.series.tail_tol},
                  {"mc_paths", std::int64_t(spec.mc.n_paths)},
                  {"mc_seed", std::int64_t(spec.mc.seed)}};
    rep.summary = {{"slope", fit.slope},
                   {"envelope_C", fit.envelope_C},
                   {"predicted_exponent", fit.predicted_exponent},
                   {"n_fit", std::int64_t(fit.n_fit)},
                   {"n_flagged", std::int64_t(fit.n_flagged)},
                   {"monotone", fit.monotone}};
    rep.columns = {"t",     "delta_x", "delta_y",    "separation", "delta_mid", "ratio", "control",
                   "approx", "oracle", "oracle_err", "rel_err",    "flagged",   "note"};
    for (const auto& r : fit.records)
        rep.add_row({r.t, r.delta_x, r.delta_y, r.separation, r.delta_mid, r.ratio, r.control, r.approx, r.oracle,
                     r.oracle_err, r.rel_err, r.flagged, r.note});
    return rep;
}

struct CalibrationResult {
    bool ok = false;
    RegimeConfig config;
    std::string failure;
    std::uint64_t grid_hash = 0;
    Report report;
};

/// One calibration grid point: which approximant, where, and its measured
/// relative error against the series oracle.
struct CalibrationPoint {
    Approximant approximant;
    double t;
    double depth;
    double separation;
    double ratio = 0.0;
    double rel_err = 0.0;
};

/// Fixed calibration grid in n = 2: Theorem 1 on two diagonal paths and one
/// chord path over delta_mid/sqrt(t) in [0.5, 20]; the linear Theorem 2
/// form on x = y with t in [1e-4, 0.04] and delta/sqrt(t) in [0.02, 2].
inline std::vector<CalibrationPoint> calibration_grid() {
    std::vector<CalibrationPoint> g;
    for (double depth : {0.2, 0.4})
        for (double R : log_grid(0.5, 20.0, 12)) g.push_back({Approximant::thm1, depth * depth / (R * R), depth, 0.0});
    {
        const double depth = 0.1, sep = 0.1;
        const double rad = 1.0 - depth, s = sep / (2.0 * rad);
        const double dmid = 1.0 - rad * std::sqrt(1.0 - s * s);
        for (double R : log_grid(0.5, 7.0, 8)) g.push_back({Approximant::thm1, dmid * dmid / (R * R), depth, sep});
    }
    for (double t : log_grid(1e-4, 0.04, 6))
        for (double R : log_grid(0.02, 2.0, 8)) g.push_back({Approximant::thm2_linear, t, R * std::sqrt(t), 0.0});
    return g;
}

/// Thresholds at which each approximant's measured relative error is at
/// most target_rel_err on the calibration grid:
///   M_thm1  = largest delta_mid/sqrt(t) among failing Theorem 1 points,
///   m1_time = smallest failing t on the row of smallest delta_mid/sqrt(t),
///   m2_thm2 = smallest delta_mid/sqrt(t) among failing Theorem 2 points with t < m1_time,
///             lowered below M_thm1 when the two regions would overlap.
inline CalibrationResult calibrate_regimes(double target_rel_err, const SeriesConfig& series = sweep_series_defaults()) {
    if (!(target_rel_err > 0.0 && target_rel_err < 1.0))
        throw UsageError("calibrate_regimes: target must lie in (0, 1)");
    std::vector<CalibrationPoint> grid = calibration_grid();
    std::vector<double> hash_input;
    for (const auto& p : grid) {
        hash_input.push_back(double(static_cast<int>(p.approximant)));
        hash_input.push_back(p.t);
        hash_input.push_back(p.depth);
        hash_input.push_back(p.separation);
    }

    parallel_for(grid.size(), [&](std::size_t i) {
        CalibrationPoint& p = grid[i];
        SweepSpec s;
        s.family = p.separation > 0.0 ? PathFamily::chord : PathFamily::diagonal;
        s.depth = p.depth;
        s.separation = p.separation;
        const auto [x, y] = s.points(p.t);
        p.ratio = midpoint_delta(x, y) / std::sqrt(p.t);
        const OracleResult o = series_kernel(p.t, x, y, series);
        const double a = p.approximant == Approximant::thm1 ? thm1_approx(p.t, x, y).value
                                                            : thm2_approx(p.t, x, y, Thm2Variant::linear).value;
        p.rel_err = std::abs(a - o.value) / o.value;
    });

    CalibrationResult res;
    res.grid_hash = fnv1a(hash_input);
    res.config = RegimeConfig{};
    std::vector<std::string> failures;

    double r1_min = std::numeric_limits<double>::infinity(), r1_max = 0.0, M = 0.0;
    bool any1 = false;
    for (const auto& p : grid) {
        if (p.approximant != Approximant::thm1) continue;
        r1_min = std::min(r1_min, p.ratio);
        r1_max = std::max(r1_max, p.ratio);
        if (p.rel_err > target_rel_err) {
            M = std::max(M, p.ratio);
            any1 = true;
        }
    }
    if (!any1) M = r1_min;
    if (any1 && M >= r1_max) failures.push_back("Theorem 1 misses the target at every grid point");

    double r2_min = std::numeric_limits<double>::infinity(), r2_max = 0.0, t2_max = 0.0;
    double t2_min = std::numeric_limits<double>::infinity();
    for (const auto& p : grid) {
        if (p.approximant == Approximant::thm1) continue;
        r2_min = std::min(r2_min, p.ratio);
        r2_max = std::max(r2_max, p.ratio);
        t2_max = std::max(t2_max, p.t);
        t2_min = std::min(t2_min, p.t);
    }
    double m1 = std::nextafter(t2_max, std::numeric_limits<double>::infinity());
    for (const auto& p : grid)
        if (p.approximant != Approximant::thm1 && std::abs(p.ratio / r2_min - 1.0) < 1e-9 && p.rel_err > target_rel_err)
            m1 = std::min(m1, p.t);
    double m2 = std::nextafter(r2_max, std::numeric_limits<double>::infinity());
    for (const auto& p : grid)
        if (p.approximant != Approximant::thm1 && p.t < m1 && p.rel_err > target_rel_err) m2 = std::min(m2, p.ratio);
    if (m2 <= r2_min * (1.0 + 1e-9) || m1 <= t2_min) failures.push_back("Theorem 2 misses the target at every grid point");
    // A smaller m2 only removes points from the Theorem 2 region.
    if (!(m2 < M)) m2 = M * (1.0 - 0x1p-20);

    res.config.M_thm1 = M;
    res.config.m1_time = m1;
    res.config.m2_thm2 = m2;
    res.ok = failures.empty();
    for (const auto& f : failures) res.failure += (res.failure.empty() ? "" : "; ") + f;

    Report& rep = res.report;
    rep.kind = "calibration";
    rep.config = {{"target_rel_err", target_rel_err},
                  {"grid_hash", std::to_string(res.grid_hash)},
                  {"grid_points", std::int64_t(grid.size())},
                  {"series_tail_tol", series.tail_tol}};
    rep.summary = {{"ok", res.ok},
                   {"M_thm1", res.config.M_thm1},
                   {"m1_time", res.config.m1_time},
                   {"m2_thm2", res.config.m2_thm2},
                   {"rho_interior", res.config.rho_interior},
                   {"failure", res.failure}};
    rep.columns = {"approximant", "t", "depth", "separation", "ratio", "rel_err", "passes"};
    for (const auto& p : grid)
        rep.add_row({std::string(approximant_name(p.approximant)), p.t, p.depth, p.separation, p.ratio, p.rel_err,
                     p.rel_err <= target_rel_err});
    return res;
}

}  // namespace bhk
