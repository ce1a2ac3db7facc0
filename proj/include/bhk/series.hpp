#pragma once

// Eigenfunction-series evaluation of the Dirichlet heat kernel of the unit
// disk (n = 2) and unit ball (n = 3), and the hitting density derived from
// it by one-sided differencing at the boundary.
//
//   k_B(t,x,y) = sum_{l,k} exp(-j_{nu,k}^2 t) R_{l,k}(|x|) R_{l,k}(|y|) Z_l(x^.y^)
//
// with nu = l + n/2 - 1, R_{l,k}(r) = sqrt(2) r^{1-n/2} J_nu(j r) / |J_{nu+1}(j)|,
// Z_l(c) = eps_l cos(l acos c) / (2 pi) for n = 2 (eps_0 = 1, eps_l = 2) and
// Z_l(c) = (2l + 1) P_l(c) / (4 pi) for n = 3.
//
// Truncation keeps every mode with j <= jcut, so the first excluded
// eigenvalue Lambda is known and the tail obeys
//   |tail| <= exp(-Lambda (t - s)) (4 pi s)^{-n/2},  0 < s <= t,
// by Cauchy-Schwarz and k_B(s,x,x) <= (4 pi s)^{-n/2}. We take
// s = min(t, n / (2 Lambda)), the minimiser.
//
// Terms in the turning-point shadow j r < nu are bounded by Kapteyn's
// inequality |J_nu(nu z)| <= (z e^{sqrt(1-z^2)} / (1 + sqrt(1-z^2)))^nu and
// skipped when the bound is negligible; the skipped bounds join err.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "bhk/bessel.hpp"
#include "bhk/error.hpp"
#include "bhk/geometry.hpp"
#include "bhk/numeric.hpp"

namespace bhk {

struct SeriesConfig {
    int dimension = 2;
    double tail_tol = 1e-10;
    std::size_t max_radial_modes = 200;
    std::size_t max_angular_modes = 200;

    void validate() const {
        if (dimension != 2 && dimension != 3) throw UsageError("SeriesConfig: dimension must be 2 or 3");
        if (!(tail_tol > 0.0)) throw UsageError("SeriesConfig: tail_tol must be > 0");
        if (max_radial_modes < 1 || max_angular_modes < 1) throw UsageError("SeriesConfig: mode caps must be >= 1");
    }
};

struct WorkCounters {
    std::uint64_t terms = 0;
    std::uint64_t paths = 0;
    std::uint64_t steps = 0;
};

/// Reference value with an absolute error bar: a truncation, evaluation and roundoff
/// bound for deterministic oracles, a standard error for Monte Carlo.
struct OracleResult {
    double value = 0.0;
    double err = 0.0;
    WorkCounters work;
};

namespace detail {

/// Relative error allowed per series term for its two Bessel factors,
/// each accurate to about 2e-13 of the local envelope.
inline constexpr double kTermEvalRelErr = 1e-12;

/// log of the tail bound for first excluded eigenvalue lambda.
inline double log_series_tail_bound(double lambda, double t, int n) {
    const double s = std::min(t, double(n) / (2.0 * lambda));
    return -lambda * (t - s) - 0.5 * n * std::log(4.0 * kPi * s);
}

/// log of the Kapteyn bound on |J_nu(x)|, 0 for x >= nu.
inline double log_bessel_bound(double nu, double x) {
    if (x >= nu) return 0.0;
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    const double z = x / nu;
    const double w = std::sqrt((1.0 - z) * (1.0 + z));
    return nu * (std::log(z / (1.0 + w)) + w);
}

struct SeriesAccumulator {
    double sum = 0.0;
    double abs_sum = 0.0;
    double skipped = 0.0;
    std::uint64_t terms = 0;
};

}  // namespace detail

/// Dirichlet heat kernel of the unit ball by eigenfunction expansion.
inline OracleResult series_kernel(double t, const Point& x, const Point& y, const SeriesConfig& cfg = {}) {
    cfg.validate();
    if (!(t > 0.0)) throw DomainError("series_kernel: t must be > 0");
    x.check_dim(y);
    const int n = cfg.dimension;
    if (int(x.dim()) != n) throw DomainError("series_kernel: point dimension differs from SeriesConfig::dimension");
    const double r = x.norm(), s = y.norm();
    if (!(r < 1.0) || !(s < 1.0)) throw DomainError("series_kernel: x and y must lie in the open unit ball");

    const double cos_angle = (r > 0.0 && s > 0.0) ? std::clamp(x.dot(y) / (r * s), -1.0, 1.0) : 1.0;
    const double offset = n == 2 ? 0.0 : 0.5;
    BesselZeroTable& table = n == 2 ? BesselZeroTable::disk() : BesselZeroTable::ball();
    const std::size_t lcap = cfg.max_angular_modes;
    const std::size_t kcap = cfg.max_radial_modes;

    // Scale guess for choosing the first cut: free kernel times the
    // boundary factor min(1, delta(x) delta(y) / t).
    const double free_log = -0.5 * n * std::log(4.0 * kPi * t) - distance_sq(x, y) / (4.0 * t);
    const double boundary = std::min(1.0, (1.0 - r) * (1.0 - s) / t);
    double target_log = free_log + std::log(std::max(boundary, 1e-300)) + std::log(cfg.tail_tol) - std::log(10.0);

    auto radial = [&](double nu, double j, double rad) {
        if (rad == 0.0) {
            if (nu != offset) return 0.0;
            return n == 2 ? 1.0 : std::sqrt(2.0 * j / kPi);
        }
        const double v = bessel_j(nu, j * rad);
        return n == 2 ? v : v / std::sqrt(rad);
    };

    auto log_radial_bound = [&](double nu, double j, double rad) {
        if (rad == 0.0) {
            if (nu != offset) return -std::numeric_limits<double>::infinity();
            return n == 2 ? 0.0 : 0.5 * std::log(2.0 * j / kPi);
        }
        const double b = detail::log_bessel_bound(nu, j * rad);
        return n == 2 ? b : b - 0.5 * std::log(rad);
    };

    detail::SeriesAccumulator acc;
    double done_cut = 0.0;  // modes with j <= done_cut are already summed
    double value = 0.0, err = 0.0;

    for (int round = 0; round < 8; ++round) {
        // Smallest Lambda whose tail bound meets the target.
        double lam = 1.0;
        while (detail::log_series_tail_bound(lam, t, n) > target_log) lam *= 1.25;
        const double jcut = std::max(std::sqrt(lam), done_cut);

        // A skipped term lies below this, far under the target summed over
        // any feasible number of modes.
        const double skip_log = target_log - std::log(1e8);
        auto rows = table.ensure(jcut, lcap + 1);
        double first_excluded = std::numeric_limits<double>::infinity();
        // Zonal factor recurrences in l.
        double z_prev = 0.0, z_cur = 1.0;  // T_l or P_l at cos_angle
        for (std::size_t l = 0; l < rows->size(); ++l) {
            if (l > 0) {
                double z_next;
                if (n == 2)
                    z_next = l == 1 ? cos_angle : 2.0 * cos_angle * z_cur - z_prev;
                else
                    z_next = l == 1 ? cos_angle : ((2.0 * l - 1.0) * cos_angle * z_cur - (l - 1.0) * z_prev) / double(l);
                z_prev = z_cur;
                z_cur = z_next;
            }
            const auto& row = (*rows)[l];
            if (l >= lcap) {
                first_excluded = std::min(first_excluded, row.front().j);
                break;
            }
            const double nu = double(l) + offset;
            const double angular =
                n == 2 ? (l == 0 ? 1.0 : 2.0) * z_cur / kPi : (2.0 * l + 1.0) * z_cur / (2.0 * kPi);
            std::size_t k = 0;
            for (; k < row.size() && k < kcap && row[k].j <= jcut; ++k) {
                const double j = row[k].j;
                if (j <= done_cut) continue;
                const double log_bound = -j * j * t + std::log(std::abs(angular)) -
                                         2.0 * std::log(std::abs(row[k].j_next)) + log_radial_bound(nu, j, r) +
                                         log_radial_bound(nu, j, s);
                if (log_bound < skip_log) {
                    acc.skipped += std::exp(log_bound);
                    continue;
                }
                const double decay = std::exp(-j * j * t);
                if (decay == 0.0) continue;
                const double rx = radial(nu, j, r);
                const double ry = (s == r) ? rx : radial(nu, j, s);
                const double term = decay * angular * rx * ry / (row[k].j_next * row[k].j_next);
                acc.sum += term;
                acc.abs_sum += std::abs(term);
                ++acc.terms;
            }
            if (k < row.size()) first_excluded = std::min(first_excluded, row[k].j);
        }
        done_cut = jcut;

        value = acc.sum;
        const double tail = std::isfinite(first_excluded)
                                ? std::exp(detail::log_series_tail_bound(first_excluded * first_excluded, t, n))
                                : 0.0;
        const double roundoff = (32.0 * std::numeric_limits<double>::epsilon() + detail::kTermEvalRelErr) * acc.abs_sum;
        err = tail + roundoff + acc.skipped;
        const bool capped = first_excluded <= jcut;
        if (err <= cfg.tail_tol * std::abs(value) || capped || tail <= roundoff) break;
        // Aim lower and extend the cut.
        target_log = std::log(cfg.tail_tol * std::abs(value)) - std::log(10.0);
        if (!(std::abs(value) > 0.0)) target_log -= 10.0;
    }

    if (!(err <= 0.1 * std::abs(value))) {
        std::ostringstream os;
        os << "series_kernel: error bound " << err << " exceeds 10% of value " << value << " at t = " << t
           << " (mode caps " << lcap << " x " << kcap
           << "); use the van den Berg bound or the boundary approximants in this regime";
        throw AccuracyError(os.str());
    }
    OracleResult out;
    out.value = value;
    out.err = err;
    out.work.terms = acc.terms;
    return out;
}

/// Hitting density q_x(t, z) of the first exit time and place, from the
/// one-sided quotient D(h) = k_B(t, x, (1 - h) z) / h Richardson-extrapolated
/// over h and h/2. err combines the extrapolation change and the series
/// error bars.
inline OracleResult hitting_density_oracle(double t, const Point& x, const Point& z, double h,
                                           const SeriesConfig& cfg = {}) {
    if (!(t > 0.0)) throw DomainError("hitting_density_oracle: t must be > 0");
    if (!(h > 0.0 && h <= 0.01)) throw DomainError("hitting_density_oracle: h must lie in (0, 0.01]");
    if (std::abs(z.norm() - 1.0) > 1e-10) throw DomainError("hitting_density_oracle: z must lie on the unit sphere");
    const OracleResult a = series_kernel(t, x, z * (1.0 - h), cfg);
    const OracleResult b = series_kernel(t, x, z * (1.0 - 0.5 * h), cfg);
    const double d1 = a.value / h;
    const double d2 = b.value / (0.5 * h);
    OracleResult out;
    out.value = 2.0 * d2 - d1;
    out.err = std::abs(d2 - d1) + a.err / h + 2.0 * b.err / (0.5 * h);
    out.work.terms = a.work.terms + b.work.terms;
    return out;
}

}  // namespace bhk
