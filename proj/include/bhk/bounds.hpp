#pragma once

// Bound-checking suites. Each suite samples its inequality's hypothesis
// region with a seeded Halton sequence, evaluates the normalized ratio
// lhs / rhs on every case, and reports the extremal ("fitted") constant
// together with pass/fail against a fixed ceiling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bhk/error.hpp"
#include "bhk/geometry.hpp"
#include "bhk/integrals.hpp"
#include "bhk/kernels.hpp"
#include "bhk/monte_carlo.hpp"
#include "bhk/numeric.hpp"
#include "bhk/report.hpp"
#include "bhk/series.hpp"

namespace bhk {

struct BoundResult {
    std::string name;
    std::string statement;
    double fitted = std::numeric_limits<double>::quiet_NaN();
    double ceiling = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::size_t n_cases = 0;
    std::size_t n_violations = 0;
    std::size_t n_flagged = 0;
    std::string note;
};

inline const std::vector<std::string>& bound_suite_names() {
    static const std::vector<std::string> names = {
        "parallel", "x0y0",   "rho",          "vdb",   "ms",         "lemma31",   "lemma41",   "lemma42",
        "lemma43",  "igamma", "oneminusexp", "ck",    "concordance", "semigroup",
    };
    return names;
}

namespace detail {

/// Points with the given depths and separation: x on the first axis, y in
/// the plane of the first two axes rotated by `tilt` towards the third
/// (n = 3). The separation is clamped to the feasible range.
inline std::pair<Point, Point> place_pair(int n, double dx, double dy, double sep, double tilt = 0.0) {
    const double rx = 1.0 - dx, ry = 1.0 - dy;
    sep = std::clamp(sep, std::abs(rx - ry), rx + ry);
    double c = (rx * rx + ry * ry - sep * sep) / (2.0 * rx * ry);
    if (!(rx > 0.0 && ry > 0.0)) c = 1.0;
    c = std::clamp(c, -1.0, 1.0);
    const double s = std::sqrt((1.0 - c) * (1.0 + c));
    std::vector<double> x(std::size_t(n), 0.0), y(std::size_t(n), 0.0);
    x[0] = rx;
    y[0] = ry * c;
    if (n == 2) {
        y[1] = ry * s;
    } else {
        y[1] = ry * s * std::cos(tilt);
        y[2] = ry * s * std::sin(tilt);
    }
    return {Point(std::move(x)), Point(std::move(y))};
}

inline double log_uniform(double lo, double hi, double u) { return lo * std::pow(hi / lo, u); }

/// Series oracle in the points' own dimension with caps suited to the
/// bound suites.
inline OracleResult suite_oracle(double t, const Point& x, const Point& y) {
    SeriesConfig cfg;
    cfg.dimension = int(x.dim());
    cfg.max_radial_modes = 2000;
    cfg.max_angular_modes = 2000;
    return series_kernel(t, x, y, cfg);
}

struct Sample {
    double ratio = 0.0;  // normalized quantity, compared against the ceiling
    bool violation = false;
    bool flagged = false;
};

/// Evaluates fn on cases 0..n-1 and folds the results: fitted is the
/// maximum ratio over unflagged cases.
template <class Fn>
void run_cases(BoundResult& res, std::size_t n, Fn&& fn) {
    std::vector<std::optional<Sample>> out(n);
    parallel_for(n, [&](std::size_t i) {
        try {
            out[i] = fn(i);
        } catch (const AccuracyError&) {
            out[i] = Sample{0.0, false, true};
        }
    });
    double fitted = -std::numeric_limits<double>::infinity();
    for (const auto& s : out) {
        if (!s) continue;
        ++res.n_cases;
        if (s->flagged) {
            ++res.n_flagged;
            continue;
        }
        if (s->violation) ++res.n_violations;
        fitted = std::max(fitted, s->ratio);
    }
    res.fitted = fitted;
}

}  // namespace detail

/// Geometric inequalities over random pairs in n = 2 and 3.
inline BoundResult check_geometry_suite(const std::string& name, std::uint64_t seed, std::size_t n_cases) {
    BoundResult res;
    res.name = name;
    const Halton h(6, seed);
    auto pair = [&](std::size_t i) {
        const auto u = h.point(i);
        const int n = i % 2 == 0 ? 2 : 3;
        const double dx = detail::log_uniform(1e-6, 0.999, u[0]);
        const double dy = detail::log_uniform(1e-6, 0.999, u[1]);
        const double rx = 1.0 - dx, ry = 1.0 - dy;
        // Angle between x and y, concentrated towards small angles.
        const double angle = kPi * u[2] * u[2] * u[3];
        const double sep = std::sqrt(rx * rx + ry * ry - 2.0 * rx * ry * std::cos(angle));
        return detail::place_pair(n, dx, dy, sep, 2.0 * kPi * u[4]);
    };
    if (name == "parallel") {
        res.statement = "|x-y|^2/8 + delta(x)/4 + delta(y)/4 <= delta(mid) everywhere, and delta(mid) <= "
                        "2 (|x-y|^2/8 + delta(x)/4 + delta(y)/4) where delta(mid) <= 1/2";
        res.ceiling = 2.0;
        std::vector<double> ratios(n_cases), dmid(n_cases);
        parallel_for(n_cases, [&](std::size_t i) {
            const auto [x, y] = pair(i);
            const double lower = distance_sq(x, y) / 8.0 + delta_ball(x) / 4.0 + delta_ball(y) / 4.0;
            dmid[i] = midpoint_delta(x, y);
            ratios[i] = dmid[i] / lower;
        });
        double fitted = 0.0, lowest = std::numeric_limits<double>::infinity(), global = 0.0;
        std::size_t outside = 0;
        for (std::size_t i = 0; i < n_cases; ++i) {
            const double r = ratios[i];
            ++res.n_cases;
            global = std::max(global, r);
            lowest = std::min(lowest, r);
            // Both sides carry rounding error of a few ulps of O(1) quantities.
            if (r < 1.0 - 1e-9) ++res.n_violations;
            if (dmid[i] > 0.5) {
                ++outside;
                continue;
            }
            if (r > 2.0 * (1.0 + 1e-9)) ++res.n_violations;
            fitted = std::max(fitted, r);
        }
        res.fitted = fitted;
        res.note = "min ratio " + detail::format_double(lowest) + "; " + std::to_string(outside) +
                   " cases with delta(mid) > 1/2 checked for the lower bound only (max ratio there " +
                   detail::format_double(global) + ")";
    } else if (name == "x0y0") {
        res.statement = "|x/|x| - y/|y|| <= 2 sqrt(6) sqrt(delta(mid))";
        res.ceiling = 2.0 * std::sqrt(6.0);
        detail::run_cases(res, n_cases, [&](std::size_t i) {
            const auto [x, y] = pair(i);
            const double r = distance(x.unit(), y.unit()) / std::sqrt(midpoint_delta(x, y));
            return detail::Sample{r, r > res.ceiling * (1.0 + 1e-9), false};
        });
    } else if (name == "rho") {
        res.statement = "rho(x,y) <= 6 delta(mid) and delta(w) <= dist(w, P_xy) + rho(x,y) for w in the ball";
        res.ceiling = 6.0;
        const Halton hw(3, seed ^ 0x9E3779B97F4A7C15ull);
        detail::run_cases(res, n_cases, [&](std::size_t i) {
            const auto [x, y] = pair(i);
            if ((x.unit() + y.unit()).norm() < 1e-6) return detail::Sample{0.0, false, true};
            const double rho = rho_cap_height(x, y);
            const double r = rho / midpoint_delta(x, y);
            // A point w of the ball, uniform in radius and direction.
            const auto v = hw.point(i);
            std::vector<double> wc(x.dim(), 0.0);
            const double radius = v[0];
            const double phi = 2.0 * kPi * v[1];
            if (x.dim() == 2) {
                wc[0] = radius * std::cos(phi);
                wc[1] = radius * std::sin(phi);
            } else {
                const double z = 2.0 * v[2] - 1.0, q = std::sqrt(1.0 - z * z);
                wc[0] = radius * q * std::cos(phi);
                wc[1] = radius * q * std::sin(phi);
                wc[2] = radius * z;
            }
            const Point w(std::move(wc));
            const HalfSpace H = chord_halfspace(x, y);
            const bool inner = delta_ball(w) > std::abs(H.signed_distance(w)) + rho + 1e-12;
            return detail::Sample{r, r > res.ceiling * (1.0 + 1e-9) || inner, false};
        });
        res.note = "antipodal pairs flagged";
    } else {
        throw UsageError("unknown geometric suite '" + name + "'");
    }
    res.pass = res.n_violations == 0 && std::isfinite(res.fitted) && res.fitted <= res.ceiling * (1.0 + 1e-9);
    return res;
}

/// vdB sandwich on interior cases with rho^2 / t in [5, 100].
inline BoundResult check_vdb(std::uint64_t seed, std::size_t n_cases) {
    BoundResult res;
    res.name = "vdb";
    res.statement = "(1 - vdb correction) k <= k_B <= k, up to oracle error";
    res.ceiling = 0.0;
    const Halton h(6, seed);
    detail::run_cases(res, n_cases, [&](std::size_t i) {
        const auto u = h.point(i);
        const int n = i % 2 == 0 ? 2 : 3;
        const double w = detail::log_uniform(5.0, 100.0, u[0]);
        const double rho = detail::log_uniform(0.05, 0.9, u[1]);
        const double t = rho * rho / w;
        const double spread = std::sqrt(60.0 * t);  // |x-y|^2 / 4t <= 15
        const double other = std::min(0.999, rho + 0.9 * spread * u[2]);
        const double dx = u[3] < 0.5 ? rho : other, dy = u[3] < 0.5 ? other : rho;
        const double lo = std::abs(dx - dy);
        const double sep = lo + (std::max(spread, lo) - lo) * u[4];
        const auto [x, y] = detail::place_pair(n, dx, dy, sep, 2.0 * kPi * u[5]);
        const OracleResult o = detail::suite_oracle(t, x, y);
        const double k = gauss_kernel(t, x, y);
        const double lower = vdb_lower_bound(t, x, y);
        const double excess = std::max(lower - o.value, o.value - k);
        return detail::Sample{excess / k, excess > o.err, false};
    });
    res.pass = res.n_violations == 0 && res.n_cases > res.n_flagged;
    res.note = "fitted is the largest excess over the sandwich relative to k; positive within oracle error is allowed";
    return res;
}

/// Two-sided estimate k_B / (h k) in [1/C, C]. Fitted is C.
inline BoundResult check_ms(std::uint64_t seed, std::size_t n_cases) {
    BoundResult res;
    res.name = "ms";
    res.statement = "1/C <= k_B / (h k) <= C for t <= 0.5";
    res.ceiling = 50.0;
    const Halton h(6, seed);
    std::vector<std::optional<double>> ratio(n_cases);
    std::vector<char> flagged(n_cases, 0);
    parallel_for(n_cases, [&](std::size_t i) {
        const auto u = h.point(i);
        const int n = i % 2 == 0 ? 2 : 3;
        const double t = detail::log_uniform(1e-3, 0.5, u[0]);
        const double st = std::sqrt(t);
        const double dx = std::min(0.999, detail::log_uniform(1e-2, 10.0, u[1]) * st);
        const double dy = std::min(0.999, detail::log_uniform(1e-2, 10.0, u[2]) * st);
        const double lo = std::abs(dx - dy);
        const double sep = lo + (std::max(std::sqrt(60.0 * t), lo) - lo) * u[3];
        const auto [x, y] = detail::place_pair(n, dx, dy, sep, 2.0 * kPi * u[4]);
        try {
            const OracleResult o = detail::suite_oracle(t, x, y);
            if (!(o.value > 0.0) || o.err > 0.01 * o.value) {
                flagged[i] = 1;
                return;
            }
            ratio[i] = o.value / (ms_estimate_h(t, x, y) * gauss_kernel(t, x, y));
        } catch (const AccuracyError&) {
            flagged[i] = 1;
        }
    });
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_cases; ++i) {
        ++res.n_cases;
        if (flagged[i]) {
            ++res.n_flagged;
            continue;
        }
        hi = std::max(hi, *ratio[i]);
        lo = std::min(lo, *ratio[i]);
    }
    res.fitted = std::max(hi, 1.0 / lo);
    res.n_violations = 0;
    for (std::size_t i = 0; i < n_cases; ++i)
        if (ratio[i] && (*ratio[i] > res.ceiling || *ratio[i] < 1.0 / res.ceiling)) ++res.n_violations;
    res.pass = std::isfinite(res.fitted) && res.fitted <= res.ceiling;
    res.note = "ratio range [" + detail::format_double(lo) + ", " + detail::format_double(hi) + "]";
    return res;
}

/// Lemma-statement diagnostics: the normalized difference is bounded by a
/// constant on the lemma's region. The numerator is |difference| plus the
/// oracle error, so a pass cannot come from oracle noise.
inline BoundResult check_lemma(const std::string& name, std::uint64_t seed, std::size_t n_cases) {
    BoundResult res;
    res.name = name;
    res.ceiling = 100.0;
    const Halton h(6, seed);
    constexpr double kMaxExponent = 18.0;  // |x-y|^2 / 4t, oracle range
    if (name == "lemma31") {
        res.statement = "|k_B - k_Hx| <= C t / delta(y)^2 k_B for delta(y)/sqrt(t) > 10";
        res.note = "region delta(y)/sqrt(t) > 10 is a library choice";
        detail::run_cases(res, n_cases, [&](std::size_t i) {
            const auto u = h.point(i);
            const int n = i % 2 == 0 ? 2 : 3;
            const double t = detail::log_uniform(1e-4, 1e-2, u[0]);
            const double st = std::sqrt(t), reach = std::sqrt(4.0 * kMaxExponent * t);
            const double dy = std::min(0.999, detail::log_uniform(10.0, 30.0, u[1]) * st);
            const double dx_lo = std::max(1e-3 * st, dy - 0.95 * reach);
            const double dx = std::min(0.999, dx_lo + (dy + 0.95 * reach - dx_lo) * u[2]);
            const double lo = std::abs(dx - dy);
            const double sep = lo + (std::max(reach, lo) - lo) * u[3];
            const auto [x, y] = detail::place_pair(n, dx, dy, sep, 2.0 * kPi * u[4]);
            const OracleResult o = detail::suite_oracle(t, x, y);
            const double kh = halfspace_kernel(t, x, y, tangent_halfspace(x));
            const double r = (std::abs(o.value - kh) + o.err) * dy * dy / (t * o.value);
            return detail::Sample{r, r > res.ceiling, false};
        });
    } else if (name == "lemma41") {
        res.statement =
            "|k_B - k_Hx| <= C delta(x)delta(y)/t k (sqrt(t) + |x-y|^2/sqrt(t) + (delta_Hx(y) - delta(y))/delta(y)) "
            "for t < 1, delta(x) <= delta(y)";
        detail::run_cases(res, n_cases, [&](std::size_t i) {
            const auto u = h.point(i);
            const int n = i % 2 == 0 ? 2 : 3;
            const double t = detail::log_uniform(1e-4, 0.5, u[0]);
            const double st = std::sqrt(t), reach = std::sqrt(4.0 * kMaxExponent * t);
            const double d1 = std::min(0.999, detail::log_uniform(1e-2, 10.0, u[1]) * st);
            const double d2 = std::min(0.999, detail::log_uniform(1e-2, 10.0, u[2]) * st);
            const double dx = std::min(d1, d2);
            const double dy = std::min(std::max(d1, d2), dx + 0.95 * reach);
            const double lo = dy - dx;
            const double sep = lo + (std::max(reach, lo) - lo) * u[3];
            const auto [x, y] = detail::place_pair(n, dx, dy, sep, 2.0 * kPi * u[4]);
            const OracleResult o = detail::suite_oracle(t, x, y);
            const HalfSpace hx = tangent_halfspace(x);
            const double kh = halfspace_kernel(t, x, y, hx);
            const double shape = dx * dy / t * gauss_kernel(t, x, y) *
                                 (st + distance_sq(x, y) / st + (hx.signed_distance(y) - dy) / dy);
            const double r = (std::abs(o.value - kh) + o.err) / shape;
            return detail::Sample{r, r > res.ceiling, false};
        });
    } else if (name == "lemma42" || name == "lemma43") {
        const bool l42 = name == "lemma42";
        res.statement = l42 ? "|k_B - k_Hxy| <= C (sqrt(t) + sqrt(delta(mid)/sqrt(t))) k_B for t < 0.05, "
                              "delta(mid)/sqrt(t) < 0.2"
                            : "|k_Hxy - delta(x)delta(y)/t k| <= C (delta(mid)/sqrt(t)) (sqrt(t) + (delta(mid)/sqrt(t))^2) "
                              "k_B for t < 0.05, delta(mid)/sqrt(t) < 0.2";
        res.note = "region constants c1 = 0.05, c2 = 0.2 are library choices";
        detail::run_cases(res, n_cases, [&](std::size_t i) {
            const auto u = h.point(i);
            const int n = i % 2 == 0 ? 2 : 3;
            const double t = detail::log_uniform(1e-4, 0.05, u[0]);
            const double st = std::sqrt(t);
            // delta(mid) ~ R sqrt(t) split between the depths and the separation.
            const double R = detail::log_uniform(5e-3, 0.19, u[1]);
            const double dm = R * st;
            const double dx = detail::log_uniform(1e-3, 1.0, u[2]) * 2.0 * dm;
            const double dy = detail::log_uniform(1e-3, 1.0, u[3]) * 2.0 * dm;
            const double room = std::max(0.0, dm - (dx + dy) / 4.0);
            const double sep = std::sqrt(8.0 * room) * u[4];
            const auto [x, y] = detail::place_pair(n, dx, dy, std::max(sep, std::abs(dx - dy)), 2.0 * kPi * u[5]);
            const double ratio = midpoint_delta(x, y) / st;
            if (!(ratio < 0.2)) return detail::Sample{0.0, false, true};
            const OracleResult o = detail::suite_oracle(t, x, y);
            const double khxy = halfspace_kernel(t, x, y, chord_halfspace(x, y));
            double r;
            if (l42) {
                r = (std::abs(o.value - khxy) + o.err) / ((st + std::sqrt(ratio)) * o.value);
            } else {
                const double lin = delta_ball(x) * delta_ball(y) / t * gauss_kernel(t, x, y);
                r = std::abs(khxy - lin) / (ratio * (st + ratio * ratio) * (o.value - o.err));
            }
            return detail::Sample{r, r > res.ceiling, false};
        });
    } else {
        throw UsageError("unknown lemma suite '" + name + "'");
    }
    res.pass = res.n_violations == 0 && std::isfinite(res.fitted) && res.n_cases > res.n_flagged;
    return res;
}

/// Band [1/c, c] of I / S over the (alpha, beta, a, b, t) grid.
struct IgammaBand {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t points = 0;
    std::size_t failures = 0;
};

inline IgammaBand igamma_band(std::size_t n_ab, std::size_t n_t) {
    const std::vector<double> ab = log_grid(0.01, 10.0, n_ab);
    const std::vector<double> ts = log_grid(1e-4, 10.0, n_t);
    const double exps[] = {1.6, 2.0, 3.0};
    IgammaBand band;
    for (double al : exps)
        for (double be : exps)
            for (double a : ab)
                for (double b : ab)
                    for (double t : ts) {
                        ++band.points;
                        try {
                            const LogValue I = log_inverse_gamma_conv_integral(t, a, b, al, be, 1e-8);
                            const double r = std::exp(I.log_value - log_estints_shape(t, a, b, al, be));
                            band.lo = std::min(band.lo, r);
                            band.hi = std::max(band.hi, r);
                        } catch (const AccuracyError&) {
                            ++band.failures;
                        }
                    }
    return band;
}

inline BoundResult check_igamma() {
    BoundResult res;
    res.name = "igamma";
    res.statement = "1/c <= I_{alpha,beta}(t,a,b) / S(t,a,b,alpha,beta) <= c, c stable under grid refinement";
    res.ceiling = 20.0;
    const IgammaBand coarse = igamma_band(9, 11);
    const IgammaBand fine = igamma_band(17, 21);
    const double c_coarse = std::max(coarse.hi, 1.0 / coarse.lo);
    const double c_fine = std::max(fine.hi, 1.0 / fine.lo);
    res.fitted = c_fine;
    res.n_cases = coarse.points + fine.points;
    res.n_flagged = coarse.failures + fine.failures;
    const bool stable = std::abs(c_fine / c_coarse - 1.0) <= 0.15;
    res.n_violations = stable ? 0 : 1;
    res.pass = stable && c_fine <= res.ceiling && res.n_flagged == 0;
    res.note = "band coarse [" + detail::format_double(coarse.lo) + ", " + detail::format_double(coarse.hi) +
               "], refined [" + detail::format_double(fine.lo) + ", " + detail::format_double(fine.hi) + "]";
    return res;
}

/// Largest lhs / rhs_scale of the (1 - e^{-u}) / (1 - e^{-v}) inequality on
/// an m x m log grid of (u, v) in [1e-6, 50]^2 with u / v > c1.
inline double one_minus_exp_c0(double c1, std::size_t m) {
    const std::vector<double> g = log_grid(1e-6, 50.0, m);
    double c0 = 0.0;
    for (double u : g)
        for (double v : g) {
            if (!(u / v > c1) || u == v) continue;
            const RatioBound b = one_minus_exp_ratio_bound(u, v, c1);
            c0 = std::max(c0, b.lhs / b.rhs_scale);
        }
    return c0;
}

inline BoundResult check_one_minus_exp() {
    BoundResult res;
    res.name = "oneminusexp";
    res.statement = "|(1-e^{-u})/(1-e^{-v}) - 1| <= c0 |u-v|/v for u/v > c1, c1 in {0.1, 1, 10}";
    res.ceiling = std::numeric_limits<double>::infinity();
    res.fitted = 0.0;
    std::string note;
    bool ok = true;
    for (double c1 : {0.1, 1.0, 10.0}) {
        const double coarse = one_minus_exp_c0(c1, 100);
        const double fine = one_minus_exp_c0(c1, 400);
        res.n_cases += 100 * 100 + 400 * 400;
        const bool stable = std::isfinite(fine) && fine > 0.0 && std::abs(fine / coarse - 1.0) <= 0.05;
        if (!stable) {
            ok = false;
            ++res.n_violations;
        }
        res.fitted = std::max(res.fitted, fine);
        note += (note.empty() ? "" : "; ") + std::string("c1=") + detail::format_double(c1) +
                ": c0 " + detail::format_double(coarse) + " -> " + detail::format_double(fine);
    }
    res.pass = ok;
    res.note = note + " (10^4 and 1.6 10^5 point grids, stable within 5%)";
    return res;
}

/// Chapman-Kolmogorov tail bounds: constants fitted on a coarse grid must
/// hold on a refined one within 25%, and lhs / k must decay faster than
/// exp(-r^2 / (16 alpha (1 - alpha) t)).
inline BoundResult check_ck() {
    BoundResult res;
    res.name = "ck";
    res.statement = "CK tail lhs <= c rhs for the weighted, kernel and full-space forms; decay beats "
                    "exp(-r^2/(16 alpha (1-alpha) t))";
    res.ceiling = 1.25;
    const Point x0({0.0, 0.0}), y0({0.0, 0.0});
    auto grid_ratio = [&](CkVariant var, std::size_t refine) {
        double worst = 0.0;
        std::size_t cases = 0;
        const std::vector<double> alphas = refine == 1 ? std::vector<double>{0.25, 0.5, 0.75} : log_grid(0.1, 0.9, 7);
        const std::vector<double> rs = log_grid(0.05, 3.0, 4 * refine);
        const std::vector<double> ts = log_grid(0.01, 0.5, 3 * refine);
        const std::vector<double> depths = log_grid(0.05, 0.9, 3 * refine);
        const std::vector<double> betas =
            var == CkVariant::halfspace_weighted ? std::vector<double>{0.0, 1.0, 2.0} : std::vector<double>{0.0};
        for (double al : alphas)
            for (double rs_ : rs)
                for (double t : ts)
                    for (double d : depths)
                        for (double be : betas) {
                            const double r = rs_ * std::sqrt(t);
                            const Point x({1.0 - d, 0.0}), y({1.0 - d, 0.5 * d});
                            const CkTail c = ck_tail_check(t, al, r, x, y, HalfSpace(Point({1.0, 0.0}), 1.0), be, var);
                            worst = std::max(worst, c.lhs_over_k / c.rhs_shape_over_k);
                            ++cases;
                        }
        return std::pair{worst, cases};
    };
    std::string note;
    double fitted = 0.0;
    for (CkVariant var : {CkVariant::halfspace_weighted, CkVariant::halfspace_kernels}) {
        const auto [c_coarse, n1] = grid_ratio(var, 1);
        const auto [c_fine, n2] = grid_ratio(var, 2);
        res.n_cases += n1 + n2;
        const double growth = c_fine / c_coarse;
        fitted = std::max(fitted, growth);
        if (!(growth <= res.ceiling)) ++res.n_violations;
        note += std::string(var == CkVariant::halfspace_weighted ? "weighted" : "kernels") + " c " +
                detail::format_double(c_coarse) + " -> " + detail::format_double(c_fine) + "; ";
    }
    // Full space: the bound constant is 1 exactly since lhs / k = e^{-r^2 / (4 alpha (1-alpha) t)} (r = 0 aside).
    double worst_full = 0.0;
    for (double al : log_grid(0.1, 0.9, 7))
        for (double rs_ : log_grid(0.05, 3.0, 8)) {
            const double t = 0.1, r = rs_ * std::sqrt(t);
            const CkTail c = ck_tail_check(t, al, r, x0, y0, std::nullopt, 0.0, CkVariant::full_space);
            worst_full = std::max(worst_full, c.lhs_over_k / c.rhs_shape_over_k);
            ++res.n_cases;
        }
    if (!(worst_full <= 1.0 + 1e-8)) ++res.n_violations;
    note += "full-space c " + detail::format_double(worst_full) + "; ";
    // Decay: (lhs / k) / exp(-s / 16) with s = r^2 / (alpha (1 - alpha) t) must fall strictly.
    bool decays = true;
    double prev = std::numeric_limits<double>::infinity(), first = 0.0, last = 0.0;
    for (double s : {16.0, 32.0, 64.0, 128.0, 256.0}) {
        const double t = 0.05, al = 0.5;
        const double r = std::sqrt(s * al * (1.0 - al) * t);
        const Point x({0.5, 0.0}), y({0.5, 0.05});
        const CkTail c = ck_tail_check(t, al, r, x, y, HalfSpace(Point({1.0, 0.0}), 1.0), 1.0);
        const double q = c.lhs_over_k / std::exp(-s / 16.0);
        if (first == 0.0) first = q;
        last = q;
        if (!(q < prev)) decays = false;
        prev = q;
        ++res.n_cases;
    }
    if (!(decays && last < 1e-6 * first)) ++res.n_violations;
    note += "decay ratio " + detail::format_double(first) + " -> " + detail::format_double(last);
    res.fitted = fitted;
    res.note = note;
    res.pass = res.n_violations == 0;
    return res;
}

/// Monte Carlo against the series oracle on 20 cases in n = 2: at most one
/// case outside 3 combined standard errors.
inline BoundResult check_concordance(std::uint64_t seed, std::size_t n_paths = 100000) {
    BoundResult res;
    res.name = "concordance";
    res.statement = "|mc - series| <= 3 sqrt(err_mc^2 + err_series^2) on 20 cases, at most one outlier";
    res.ceiling = 3.0;
    struct Case {
        double t, dx, dy, sep;
    };
    // Ten interior cases (rho^2 / t between 10 and 14) and ten boundary-regime cases.
    const std::vector<Case> cases = {
        {0.02, 0.5, 0.5, 0.0},    {0.02, 0.45, 0.6, 0.2},   {0.01, 0.35, 0.4, 0.1},    {0.005, 0.25, 0.3, 0.05},
        {0.03, 0.6, 0.55, 0.25},  {0.04, 0.7, 0.7, 0.3},    {0.008, 0.3, 0.35, 0.15},  {0.015, 0.45, 0.45, 0.3},
        {0.05, 0.75, 0.8, 0.4},   {0.003, 0.2, 0.2, 0.1},   {0.005, 0.1, 0.1, 0.05},   {0.005, 0.05, 0.1, 0.1},
        {0.01, 0.05, 0.05, 0.0},  {0.002, 0.03, 0.05, 0.05}, {0.02, 0.1, 0.2, 0.15},  {0.05, 0.1, 0.05, 0.2},
        {0.01, 0.02, 0.2, 0.2},   {0.003, 0.04, 0.04, 0.08}, {0.1, 0.2, 0.1, 0.3},    {0.02, 0.05, 0.08, 0.12},
    };
    McConfig mc;
    mc.n_paths = n_paths;
    mc.seed = seed;
    std::vector<double> z(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Case& c = cases[i];
        const auto [x, y] = detail::place_pair(2, c.dx, c.dy, c.sep);
        const OracleResult s = detail::suite_oracle(c.t, x, y);
        mc.seed = seed + i;
        const OracleResult m = mc_kernel(c.t, x, y, mc);
        z[i] = std::abs(m.value - s.value) / std::sqrt(m.err * m.err + s.err * s.err);
        ++res.n_cases;
        if (z[i] > res.ceiling) ++res.n_violations;
    }
    res.fitted = *std::max_element(z.begin(), z.end());
    res.pass = res.n_violations <= 1;
    res.note = "fitted is the largest |z|; one outlier beyond 3 is permitted";
    return res;
}

/// int_B k_B(t/2, x, z) k_B(t/2, z, y) dz against k_B(t, x, y) in n = 2.
struct SemigroupCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
};

inline SemigroupCheck semigroup_check(double t, const Point& x, const Point& y) {
    if (x.dim() != 2) throw UsageError("semigroup_check: n = 2 only");
    SeriesConfig cfg;
    cfg.tail_tol = 1e-12;
    const OracleResult full = series_kernel(t, x, y, cfg);
    double max_err = 0.0;
    auto half = [&](const Point& z, const Point& w) {
        const OracleResult o = series_kernel(0.5 * t, z, w, cfg);
        max_err = std::max(max_err, o.err);
        return o.value;
    };
    auto radial = [&](double r) {
        if (r >= 1.0) return 0.0;
        auto angular = [&](double phi) {
            const Point z({r * std::cos(phi), r * std::sin(phi)});
            return half(x, z) * half(z, y);
        };
        return r * integrate(angular, 0.0, 2.0 * kPi, 1e-9, 1e-300).value;
    };
    const Quadrature q = integrate(radial, 0.0, 1.0, 1e-8, 1e-300);
    SemigroupCheck s;
    s.lhs = q.value;
    s.rhs = full.value;
    s.residual = std::abs(q.value - full.value);
    s.tolerance = q.error + full.err + 2.0 * max_err + kPi * max_err * max_err;
    return s;
}

inline BoundResult check_semigroup() {
    BoundResult res;
    res.name = "semigroup";
    res.statement = "|int_B k_B(t/2,x,z) k_B(t/2,z,y) dz - k_B(t,x,y)| <= quadrature + truncation tolerance";
    res.ceiling = 1.0;
    struct Triple {
        double t;
        Point x, y;
    };
    const std::vector<Triple> triples = {
        {0.1, Point({0.0, 0.0}), Point({0.3, 0.0})},   {0.2, Point({0.5, 0.0}), Point({0.0, 0.5})},
        {0.05, Point({0.6, 0.1}), Point({0.5, -0.2})}, {0.15, Point({0.8, 0.0}), Point({0.7, 0.3})},
        {0.3, Point({-0.4, 0.4}), Point({0.2, 0.1})},
    };
    double worst = 0.0;
    for (const auto& tr : triples) {
        const SemigroupCheck s = semigroup_check(tr.t, tr.x, tr.y);
        const double r = s.residual / s.tolerance;
        worst = std::max(worst, r);
        ++res.n_cases;
        if (r > 1.0) ++res.n_violations;
    }
    res.fitted = worst;
    res.pass = res.n_violations == 0;
    res.note = "fitted is the largest residual / tolerance";
    return res;
}

inline BoundResult run_one_suite(const std::string& name, std::uint64_t seed, std::size_t n_cases) {
    if (name == "parallel" || name == "x0y0" || name == "rho") return check_geometry_suite(name, seed, n_cases);
    if (name == "vdb") return check_vdb(seed, n_cases);
    if (name == "ms") return check_ms(seed, n_cases);
    if (name.rfind("lemma", 0) == 0) return check_lemma(name, seed, n_cases);
    if (name == "igamma") return check_igamma();
    if (name == "oneminusexp") return check_one_minus_exp();
    if (name == "ck") return check_ck();
    if (name == "concordance") return check_concordance(seed);
    if (name == "semigroup") return check_semigroup();
    throw UsageError("unknown suite '" + name + "'");
}

/// Runs the named suites (all when empty). Deterministic given seed.
inline std::vector<BoundResult> run_bound_suite(std::uint64_t seed, std::size_t n_cases,
                                                std::vector<std::string> suites = {}) {
    if (n_cases < 1) throw UsageError("run_bound_suite: n_cases must be >= 1");
    if (suites.empty()) suites = bound_suite_names();
    for (const auto& s : suites)
        if (std::find(bound_suite_names().begin(), bound_suite_names().end(), s) == bound_suite_names().end())
            throw UsageError("unknown suite '" + s + "'");
    std::vector<BoundResult> out;
    for (const auto& s : suites) out.push_back(run_one_suite(s, seed, n_cases));
    return out;
}

inline Report bound_report(const std::vector<BoundResult>& results, std::uint64_t seed, std::size_t n_cases) {
    Report rep;
    rep.kind = "bound_suite";
    rep.config = {{"seed", std::int64_t(seed)}, {"n_cases", std::int64_t(n_cases)}};
    std::int64_t passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    rep.summary = {{"suites", std::int64_t(results.size())},
                   {"passed", passed},
                   {"failed", std::int64_t(results.size()) - passed}};
    rep.columns = {"suite", "statement", "fitted", "ceiling", "pass", "n_cases", "n_violations", "n_flagged", "note"};
    for (const auto& r : results)
        rep.add_row({r.name, r.statement, r.fitted, r.ceiling, r.pass, std::int64_t(r.n_cases),
                     std::int64_t(r.n_violations), std::int64_t(r.n_flagged), r.note});
    return rep;
}

}  // namespace bhk
