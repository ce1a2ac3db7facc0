#pragma once

// Quadrature oracles for the inverse-gamma convolution
//
//   I_{alpha,beta}(t,a,b) = int_0^t s^{-alpha} (t-s)^{-beta} exp(-a^2/s - b^2/(t-s)) ds,
//
// its two-sided shape S, and the Chapman-Kolmogorov tail integrals over the
// complement of a ball around the Gaussian meeting point.
//
// With s = t / (1 + e^{-u}) the exponent becomes
//   -a^2/s - b^2/(t-s) = -(a+b)^2/t - (b e^{u/2} - a e^{-u/2})^2 / t,
// so after factoring exp(-(a+b)^2/t) the integrand peaks near u0 = log(a/b)
// with width sqrt(t / (2ab)) and decays double-exponentially on both sides.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "bhk/error.hpp"
#include "bhk/geometry.hpp"
#include "bhk/kernels.hpp"
#include "bhk/numeric.hpp"

namespace bhk {

/// log of a positive quantity together with a relative error estimate.
struct LogValue {
    double log_value = 0.0;
    double rel_err = 0.0;
};

namespace detail {

inline void check_conv_args(double t, double a, double b, double alpha, double beta, const char* who) {
    if (!(t > 0.0) || !(a > 0.0) || !(b > 0.0)) throw DomainError(std::string(who) + ": t, a, b must be > 0");
    if (!(alpha >= 1.5) || !(beta >= 1.5)) throw DomainError(std::string(who) + ": alpha, beta must be >= 3/2");
}

inline double log_sum_exp(std::initializer_list<double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Integral of f over [from, +inf) (dir = +1) or (-inf, from] (dir = -1),
/// f unimodal-ish with scale `width` and eventually decaying
/// double-exponentially. Integrates doubling panels until a panel adds
/// nothing at the requested tolerance.
template <class F>
Quadrature integrate_outward(F& f, double from, int dir, double width, double rel_tol) {
    Quadrature total;
    double w = width, lo = from;
    for (int panel = 0; panel < 200; ++panel) {
        const double hi = lo + dir * w;
        const Quadrature q = dir > 0 ? integrate(f, lo, hi, rel_tol, 0.0) : integrate(f, hi, lo, rel_tol, 0.0);
        total.value += q.value;
        total.error += q.error;
        const bool decayed = std::abs(f(hi)) <= 1e-30 * std::max(std::abs(total.value), 1e-300);
        if (panel > 0 && decayed && std::abs(q.value) <= 1e-18 * std::abs(total.value)) return total;
        lo = hi;
        w *= 2.0;
    }
    throw AccuracyError("integrate_outward: integrand did not decay");
}

}  // namespace detail

/// log I_{alpha,beta}(t,a,b). Throws AccuracyError if the quadrature's
/// relative error estimate exceeds tol.
inline LogValue log_inverse_gamma_conv_integral(double t, double a, double b, double alpha, double beta,
                                                double tol = 1e-10) {
    detail::check_conv_args(t, a, b, alpha, beta, "inverse_gamma_conv_integral");
    if (!(tol > 0.0)) throw UsageError("inverse_gamma_conv_integral: tol must be > 0");
    const double u0 = std::log(a / b);
    auto log_weight = [&](double u) {
        // log s and log(t - s) without cancellation.
        const double log_s = std::log(t) - std::log1p(std::exp(-u));
        const double log_r = std::log(t) - std::log1p(std::exp(u));
        const double g = b * std::exp(0.5 * u) - a * std::exp(-0.5 * u);
        return (1.0 - alpha) * log_s + (1.0 - beta) * log_r - std::log(t) - g * g / t;
    };
    const double l0 = log_weight(u0);
    auto f = [&](double u) { return std::exp(log_weight(u) - l0); };
    const double width = std::min(1.0, std::sqrt(t / (2.0 * a * b)));
    const double inner_tol = 0.1 * tol;
    const Quadrature left = detail::integrate_outward(f, u0, -1, width, inner_tol);
    const Quadrature right = detail::integrate_outward(f, u0, +1, width, inner_tol);
    const double sum = left.value + right.value;
    const double rel = (left.error + right.error) / sum;
    if (!(rel <= tol)) {
        std::ostringstream os;
        os << "inverse_gamma_conv_integral: relative error " << rel << " above tolerance " << tol;
        throw AccuracyError(os.str());
    }
    return {-(a + b) * (a + b) / t + l0 + std::log(sum), rel};
}

inline double inverse_gamma_conv_integral(double t, double a, double b, double alpha, double beta,
                                          double tol = 1e-10) {
    return std::exp(log_inverse_gamma_conv_integral(t, a, b, alpha, beta, tol).log_value);
}

/// log of the two-sided shape
///   S = e^{-(a+b)^2/t} [ ((t/a^2)^{alpha-1} + (t/b^2)^{beta-1}) / t^{alpha+beta-1}
///       + (a+b)^{alpha+beta-2} / t^{alpha+beta-1} * sqrt(t) / (a^{alpha-1} b^{beta-1} sqrt(t + ab)) ].
inline double log_estints_shape(double t, double a, double b, double alpha, double beta) {
    detail::check_conv_args(t, a, b, alpha, beta, "estints_shape");
    const double lt = std::log(t), la = std::log(a), lb = std::log(b);
    const double p = alpha + beta - 1.0;
    const double t1 = (alpha - 1.0) * (lt - 2.0 * la) - p * lt;
    const double t2 = (beta - 1.0) * (lt - 2.0 * lb) - p * lt;
    const double t3 = (alpha + beta - 2.0) * std::log(a + b) - p * lt + 0.5 * lt - (alpha - 1.0) * la -
                      (beta - 1.0) * lb - 0.5 * std::log(t + a * b);
    return -(a + b) * (a + b) / t + detail::log_sum_exp({t1, t2, t3});
}

inline double estints_shape(double t, double a, double b, double alpha, double beta) {
    return std::exp(log_estints_shape(t, a, b, alpha, beta));
}

enum class CkVariant {
    halfspace_weighted,  // k k delta_H^beta over H minus the ball
    halfspace_kernels,   // k_H k_H over H minus the ball
    full_space,          // k k over R^n minus the ball
};

/// lhs: the tail integral. rhs_shape: the bound without its constant, so
/// lhs <= c * rhs_shape is the inequality under test. Both are also given
/// relative to k(t,x,y), which stays finite when k underflows.
struct CkTail {
    double lhs = 0.0;
    double rhs_shape = 0.0;
    double lhs_over_k = 0.0;
    double rhs_shape_over_k = 0.0;
};

/// Tail integral over {z in H : |z - c| > r}, c = (1 - alpha) x + alpha y.
/// The product k(alpha t, x, z) k((1-alpha) t, z, y) equals k(t,x,y) times
/// a centred Gaussian in z - c of variance 2 alpha (1-alpha) t per
/// coordinate; in polar coordinates around c the angular part reduces to
///   omega_{n-2} int_0^pi phi(delta_H(c) - rho cos theta) sin^{n-2} theta dtheta
/// with phi the weight, vanishing outside H.
inline CkTail ck_tail_check(double t, double alpha, double r, const Point& x, const Point& y,
                            const std::optional<HalfSpace>& H, double beta,
                            CkVariant variant = CkVariant::halfspace_weighted, double tol = 1e-9) {
    if (!(t > 0.0)) throw DomainError("ck_tail_check: t must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ck_tail_check: alpha must lie in (0, 1)");
    if (!(r >= 0.0)) throw DomainError("ck_tail_check: r must be >= 0");
    if (!(beta >= 0.0)) throw DomainError("ck_tail_check: beta must be >= 0");
    x.check_dim(y);
    const bool full = variant == CkVariant::full_space;
    if (!full && !H) throw UsageError("ck_tail_check: half-space variants need H");
    if (full && beta != 0.0) throw UsageError("ck_tail_check: the full-space variant has beta = 0");

    const std::size_t n = x.dim();
    const double var = 2.0 * alpha * (1.0 - alpha) * t;  // per-coordinate variance
    const double scale = std::sqrt(2.0 * var);           // rho = scale * v  gives  exp(-v^2)
    const double k = gauss_kernel(t, x, y);

    const double dx = full ? 0.0 : H->signed_distance(x);
    const double dy = full ? 0.0 : H->signed_distance(y);
    if (!full && (dx <= 0.0 || dy <= 0.0)) throw DomainError("ck_tail_check: x and y must lie inside H");
    const Point c = x * (1.0 - alpha) + y * alpha;
    const double dc = full ? std::numeric_limits<double>::infinity() : H->signed_distance(c);

    auto phi = [&](double d) {
        if (d <= 0.0) return 0.0;
        if (variant == CkVariant::halfspace_kernels)
            return one_minus_exp(dx * d / (alpha * t)) * one_minus_exp(d * dy / ((1.0 - alpha) * t));
        return beta == 0.0 ? 1.0 : std::pow(d, beta);
    };
    const double m = double(n) - 2.0;
    const double omega = 2.0 * std::pow(kPi, 0.5 * (m + 1.0)) / std::tgamma(0.5 * (m + 1.0));
    const double sphere = 2.0 * std::pow(kPi, 0.5 * double(n)) / std::tgamma(0.5 * double(n));

    auto angular = [&](double rho) {
        if (full || rho == 0.0) return sphere * phi(dc);
        const double q = dc / rho;
        if (q >= 1.0 && beta == 0.0 && variant == CkVariant::halfspace_weighted) return sphere;
        const double theta0 = q >= 1.0 ? 0.0 : std::acos(std::max(-1.0, q));
        auto g = [&](double th) { return phi(dc - rho * std::cos(th)) * (m == 0.0 ? 1.0 : std::pow(std::sin(th), m)); };
        return omega * integrate(g, theta0, kPi, 0.1 * tol, 0.0).value;
    };
    // Gaussian density of |w| = rho = scale v, in v: (pi)^{-n/2} e^{-v^2} v^{n-1}.
    auto radial = [&](double v) {
        const double rho = scale * v;
        return std::pow(kPi, -0.5 * double(n)) * std::exp(-v * v) * std::pow(v, double(n) - 1.0) * angular(rho);
    };
    const double v_lo = r / scale;
    const double v_hi = std::max(v_lo, 1.0) + 12.0;
    Quadrature q{0.0, 0.0};
    auto add = [&](double a, double b) {
        if (!(b > a)) return;
        const Quadrature p = integrate(radial, a, b, tol, 0.0);
        q.value += p.value;
        q.error += p.error;
    };
    const double v_kink = std::isfinite(dc) ? dc / scale : v_hi;
    if (v_kink > v_lo && v_kink < v_hi) {
        add(v_lo, v_kink);
        add(v_kink, v_hi);
    } else {
        add(v_lo, v_hi);
    }
    if (q.value > 0.0 && q.error > 10.0 * tol * q.value + 1e-300) {
        std::ostringstream os;
        os << "ck_tail_check: quadrature error " << q.error << " too large for value " << q.value;
        throw AccuracyError(os.str());
    }

    CkTail out;
    out.lhs_over_k = q.value;
    const double decay = std::exp(-r * r / (8.0 * alpha * (1.0 - alpha) * t));
    switch (variant) {
        case CkVariant::halfspace_weighted:
            out.rhs_shape_over_k = std::pow(t, 0.5 * beta) * decay * std::pow(1.0 + (dx + dy) / std::sqrt(t), beta);
            break;
        case CkVariant::halfspace_kernels:
            out.rhs_shape_over_k = one_minus_exp(dx * dy / t) * decay / (alpha * (1.0 - alpha));
            break;
        case CkVariant::full_space: out.rhs_shape_over_k = decay; break;
    }
    out.lhs = out.lhs_over_k * k;
    out.rhs_shape = out.rhs_shape_over_k * k;
    return out;
}

}  // namespace bhk
