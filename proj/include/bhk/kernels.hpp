#pragma once

// Closed-form kernels and short-time approximants of the Dirichlet heat
// kernel k_B of the unit ball. The generator is the Laplacian, so the free
// kernel is k(t,x,y) = (4 pi t)^{-n/2} exp(-|x-y|^2 / 4t).

#include <cmath>
#include <string>
#include <string_view>

#include "bhk/error.hpp"
#include "bhk/geometry.hpp"
#include "bhk/numeric.hpp"
#include "bhk/series.hpp"

namespace bhk {

enum class Regime { interior, thm1_boundary, thm2_boundary, oracle_fallback };

inline std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::interior: return "interior";
        case Regime::thm1_boundary: return "thm1-boundary";
        case Regime::thm2_boundary: return "thm2-boundary";
        case Regime::oracle_fallback: return "oracle-fallback";
    }
    return "unknown";
}

struct KernelEstimate {
    double value = 0.0;
    Regime regime = Regime::oracle_fallback;
    double error_indicator = 0.0;
};

struct RegimeConfig {
    double M_thm1 = 5.0;
    double m2_thm2 = 0.2;
    double m1_time = 0.05;
    double rho_interior = 10.0;

    void validate() const {
        if (!(M_thm1 > 0.0 && m2_thm2 > 0.0 && m1_time > 0.0 && rho_interior > 0.0))
            throw UsageError("RegimeConfig: thresholds must be > 0");
        if (!(M_thm1 > m2_thm2)) throw UsageError("RegimeConfig: M_thm1 must exceed m2_thm2");
    }
};

enum class Thm2Variant { linear, exponential };

namespace detail {
inline void require_positive_time(double t, const char* who) {
    if (!(t > 0.0)) throw DomainError(std::string(who) + ": t must be > 0");
}
}  // namespace detail

inline double gauss_kernel(double t, const Point& x, const Point& y) {
    detail::require_positive_time(t, "gauss_kernel");
    const double n = double(x.dim());
    return std::exp(-0.5 * n * std::log(4.0 * kPi * t) - distance_sq(x, y) / (4.0 * t));
}

inline double halfspace_kernel(double t, const Point& x, const Point& y, const HalfSpace& H) {
    detail::require_positive_time(t, "halfspace_kernel");
    const double dx = H.signed_distance(x), dy = H.signed_distance(y);
    if (dx < -kBallTolerance || dy < -kBallTolerance)
        throw DomainError("halfspace_kernel: point outside the half-space");
    return one_minus_exp(std::max(dx, 0.0) * std::max(dy, 0.0) / t) * gauss_kernel(t, x, y);
}

inline KernelEstimate thm1_approx(double t, const Point& x, const Point& y) {
    detail::require_positive_time(t, "thm1_approx");
    const HalfSpace hx = tangent_halfspace(x);
    const HalfSpace hy = tangent_halfspace(y);
    const Point mid = midpoint(x, y);
    const double fx = one_minus_exp(2.0 * delta_ball(x) * hx.signed_distance(mid) / t);
    const double fy = one_minus_exp(2.0 * delta_ball(y) * hy.signed_distance(mid) / t);
    KernelEstimate e;
    e.value = fx * fy * gauss_kernel(t, x, y);
    e.regime = Regime::thm1_boundary;
    e.error_indicator = std::sqrt(std::sqrt(t) / delta_ball(mid));
    return e;
}

inline KernelEstimate thm2_approx(double t, const Point& x, const Point& y,
                                  Thm2Variant variant = Thm2Variant::exponential) {
    detail::require_positive_time(t, "thm2_approx");
    const double w = delta_ball(x) * delta_ball(y) / t;
    KernelEstimate e;
    e.value = (variant == Thm2Variant::linear ? w : one_minus_exp(w)) * gauss_kernel(t, x, y);
    e.regime = Regime::thm2_boundary;
    e.error_indicator = std::sqrt(t) + std::sqrt(midpoint_delta(x, y) / std::sqrt(t));
    return e;
}

/// e^{-w} sum_{k=1..n} 2^k / (k-1)! w^{k-1} with w = rho^2 / t and
/// rho = min(delta(x), delta(y)).
inline double vdb_correction(double t, const Point& x, const Point& y) {
    detail::require_positive_time(t, "vdb_correction");
    const double rho = segment_boundary_distance(x, y);
    const double w = rho * rho / t;
    double term = 2.0, sum = 0.0;
    for (std::size_t k = 1; k <= x.dim(); ++k) {
        sum += term;
        term *= 2.0 * w / double(k);
    }
    return std::exp(-w) * sum;
}

inline double vdb_lower_bound(double t, const Point& x, const Point& y) {
    return std::max(0.0, 1.0 - vdb_correction(t, x, y)) * gauss_kernel(t, x, y);
}

inline double ms_estimate_h(double t, const Point& x, const Point& y) {
    detail::require_positive_time(t, "ms_estimate_h");
    const double dx = delta_ball(x), dy = delta_ball(y), d2 = distance_sq(x, y);
    return std::min(1.0, dx * dy / t) + std::min(1.0, dx * d2 / t) * std::min(1.0, dy * d2 / t);
}

/// Forced choice of hitting-density approximant; automatic compares
/// delta((x+z)/2)/sqrt(t) with sqrt(M_thm1 * m2_thm2).
enum class HittingRegime { automatic, near_field, far_field };

inline KernelEstimate hitting_density_approx(double t, const Point& x, const Point& z, const RegimeConfig& cfg = {},
                                             HittingRegime which = HittingRegime::automatic) {
    detail::require_positive_time(t, "hitting_density_approx");
    if (std::abs(z.norm() - 1.0) > 1e-10) throw DomainError("hitting_density_approx: z must lie on the unit sphere");
    const Point mid = midpoint(x, z);
    const double dmid = delta_ball(mid);
    const double ratio = dmid / std::sqrt(t);
    if (which == HittingRegime::automatic)
        which = ratio >= std::sqrt(cfg.M_thm1 * cfg.m2_thm2) ? HittingRegime::far_field : HittingRegime::near_field;
    const double k = gauss_kernel(t, x, z);
    KernelEstimate e;
    if (which == HittingRegime::far_field) {
        const double a = tangent_halfspace(x).signed_distance(mid);
        const double b = tangent_halfspace(z).signed_distance(mid);
        e.value = one_minus_exp(2.0 * delta_ball(x) * a / t) * (2.0 * b / t) * k;
        e.regime = Regime::thm1_boundary;
        e.error_indicator = std::sqrt(std::sqrt(t) / dmid);
    } else {
        if (!(x.norm() > 0.0)) throw DegenerateGeometryError("hitting_density_approx: x must be nonzero");
        e.value = delta_ball(x) / t * k;
        e.regime = Regime::thm2_boundary;
        e.error_indicator = std::sqrt(t) + std::sqrt(ratio);
    }
    return e;
}

struct RatioBound {
    double lhs = 0.0;
    double rhs_scale = 0.0;
};

/// lhs = |(1 - e^{-u}) / (1 - e^{-v}) - 1|, rhs_scale = |u - v| / v.
inline RatioBound one_minus_exp_ratio_bound(double u, double v, double c1) {
    if (!(u > 0.0) || !(v > 0.0) || !(c1 > 0.0))
        throw DomainError("one_minus_exp_ratio_bound: u, v and c1 must be > 0");
    if (!(u / v > c1)) throw DomainError("one_minus_exp_ratio_bound: need u / v > c1");
    // (e^{-v} - e^{-u}) / (1 - e^{-v}), kept free of cancellation.
    const double lhs = std::exp(-v) * std::abs(std::expm1(v - u)) / one_minus_exp(v);
    return {lhs, std::abs(u - v) / v};
}

inline Regime regime_select(double t, const Point& x, const Point& y, const RegimeConfig& cfg = {}) {
    detail::require_positive_time(t, "regime_select");
    cfg.validate();
    const double ratio = midpoint_delta(x, y) / std::sqrt(t);
    const bool nonzero = x.norm() > 0.0 && y.norm() > 0.0;
    if (nonzero && ratio > cfg.M_thm1) return Regime::thm1_boundary;
    const double rho = segment_boundary_distance(x, y);
    if (rho * rho / t > cfg.rho_interior && vdb_correction(t, x, y) < 1.0) return Regime::interior;
    if (t < cfg.m1_time && ratio < cfg.m2_thm2) return Regime::thm2_boundary;
    return Regime::oracle_fallback;
}

/// Regime-dispatched estimate of k_B(t,x,y). The interior value is the
/// centre of the van den Berg sandwich [vdb_lower_bound, gauss_kernel].
inline KernelEstimate kernel_eval(double t, const Point& x, const Point& y, const RegimeConfig& cfg = {},
                                  SeriesConfig series = {}) {
    const Regime r = regime_select(t, x, y, cfg);
    switch (r) {
        case Regime::thm1_boundary: return thm1_approx(t, x, y);
        case Regime::thm2_boundary: return thm2_approx(t, x, y);
        case Regime::interior: {
            const double corr = vdb_correction(t, x, y);
            KernelEstimate e;
            e.value = (1.0 - 0.5 * corr) * gauss_kernel(t, x, y);
            e.regime = r;
            e.error_indicator = 0.5 * corr / (1.0 - 0.5 * corr);
            return e;
        }
        case Regime::oracle_fallback: break;
    }
    if (x.dim() != 2 && x.dim() != 3)
        throw DomainError("kernel_eval: no closed-form regime applies and the series oracle needs n = 2 or 3");
    series.dimension = int(x.dim());
    const OracleResult o = series_kernel(t, x, y, series);
    KernelEstimate e;
    e.value = std::max(0.0, o.value);
    e.regime = r;
    e.error_indicator = o.value > 0.0 ? o.err / o.value : o.err;
    return e;
}

}  // namespace bhk
