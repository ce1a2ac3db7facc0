#pragma once

// Bessel functions of the first kind J_nu(x), real nu >= 0, x >= 0, and
// their positive zeros j_{nu,k}.
//
// Evaluation: ascending series for x <= 2, otherwise Miller's backward
// recurrence from an order well past max(nu, x) with overflow rescaling,
// normalised by
//   nu0 = 0   : 1 = J_0 + 2 sum_k J_{2k}
//   nu0 = 1/2 : the elementary J_{1/2}, J_{3/2}
//   otherwise : (x/2)^nu0 = sum_k (nu0 + 2k) Gamma(nu0 + k) / k! J_{nu0+2k}
// where nu0 = nu - floor(nu).

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

#include "bhk/error.hpp"
#include "bhk/numeric.hpp"

namespace bhk {

/// J_nu(x) and J_{nu+1}(x).
struct BesselPair {
    double j;
    double j_next;
};

namespace detail {

inline double bessel_series(double nu, double x) {
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double q = -0.25 * x * x;
    double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (double(k) * (double(k) + nu));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

inline BesselPair bessel_miller(double nu, double x) {
    const double nu0 = nu - std::floor(nu);
    const auto m = static_cast<long>(std::floor(nu));  // target index: order nu0 + m
    const double big = std::max(nu, x);
    auto top = static_cast<long>(std::ceil(big - nu0 + 20.0 + 10.0 * std::cbrt(0.5 * x))) + 2;
    top += top % 2;  // even, so the pair loop below sees even indices first

    const bool integer_order = nu0 == 0.0;
    const bool half_order = nu0 == 0.5;
    const bool general_order = !integer_order && !half_order;

    // Gamma(nu0 + k) / k!, advanced downward from k = top / 2.
    double gk = 0.0;
    if (general_order) gk = std::exp(std::lgamma(nu0 + double(top / 2)) - std::lgamma(double(top / 2) + 1.0));

    const double two_over_x = 2.0 / x;
    double f_up = 0.0;  // order nu0 + i + 1
    double f = 1e-280;  // order nu0 + i
    double at_m = 0.0, at_m1 = 0.0;
    double norm = 0.0;
    double f1 = 0.0;

    auto rescale = [&] {
        constexpr double s = 1e-250;
        f *= s;
        f_up *= s;
        at_m *= s;
        at_m1 *= s;
        norm *= s;
        f1 *= s;
    };
    auto capture = [&](long i) {
        if (i == m) at_m = f;
        if (i == m + 1) at_m1 = f;
        if (i == 1) f1 = f;
    };

    for (long i = top; i > 0; i -= 2) {
        // even index i
        if (integer_order) {
            norm += 2.0 * f;
        } else if (general_order) {
            const double k = double(i / 2);
            norm += (nu0 + 2.0 * k) * gk * f;
            gk *= k / (nu0 + k - 1.0);
        }
        capture(i);
        double f_down = (nu0 + double(i)) * two_over_x * f - f_up;
        f_up = f;
        f = f_down;
        // odd index i - 1
        capture(i - 1);
        f_down = (nu0 + double(i - 1)) * two_over_x * f - f_up;
        f_up = f;
        f = f_down;
        if (std::abs(f) > 1e250) rescale();
    }
    // f now holds index 0
    capture(0);
    const double f0 = f;
    if (integer_order) norm += f;
    if (general_order) norm += nu0 * gk * f;

    double scale;
    if (integer_order) {
        scale = 1.0 / norm;
    } else if (half_order) {
        const double pre = std::sqrt(2.0 / (kPi * x));
        const double j_half = pre * std::sin(x);
        const double j_three_half = pre * (std::sin(x) / x - std::cos(x));
        scale = std::abs(j_half) >= std::abs(j_three_half) ? j_half / f0 : j_three_half / f1;
    } else {
        scale = std::pow(0.5 * x, nu0) / norm;
    }
    return {at_m * scale, at_m1 * scale};
}

}  // namespace detail

inline BesselPair bessel_j_pair(double nu, double x) {
    if (!(nu >= 0.0) || !(x >= 0.0)) throw DomainError("bessel_j: need nu >= 0 and x >= 0");
    if (x <= 2.0) return {detail::bessel_series(nu, x), detail::bessel_series(nu + 1.0, x)};
    return detail::bessel_miller(nu, x);
}

inline double bessel_j(double nu, double x) { return bessel_j_pair(nu, x).j; }

namespace detail {

/// Safeguarded Newton on a bracket [a, b] of J_nu with J_nu(a) = fa and
/// J_nu(b) = fb of opposite signs. Returns the zero and J_{nu+1} there.
inline BesselPair refine_bessel_zero(double nu, double a, double b, double fa, double fb) {
    if (fa == 0.0) return {a, bessel_j_pair(nu, a).j_next};
    if (fb == 0.0) return {b, bessel_j_pair(nu, b).j_next};
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream os;
        os << "bessel zero: bracket [" << a << ", " << b << "] has no sign change for nu = " << nu;
        throw AccuracyError(os.str());
    }
    double lo = fa < 0.0 ? a : b;
    double hi = fa < 0.0 ? b : a;
    double x = a + (b - a) * fa / (fa - fb);
    double dx_old = std::abs(b - a), dx = dx_old;
    BesselPair p = bessel_j_pair(nu, x);
    for (int it = 0; it < 100; ++it) {
        const double f = p.j;
        if (f == 0.0) return {x, p.j_next};
        const double df = nu / x * p.j - p.j_next;
        const bool newton_out = ((x - hi) * df - f) * ((x - lo) * df - f) > 0.0;
        const bool too_slow = std::abs(2.0 * f) > std::abs(dx_old * df);
        dx_old = dx;
        if (newton_out || too_slow) {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = f / df;
            x -= dx;
            // J_{nu+1} moves by O(|dx|) = O(eps x): keep the last evaluation.
            if (std::abs(dx) <= 4.0 * std::numeric_limits<double>::epsilon() * x) return {x, p.j_next};
        }
        p = bessel_j_pair(nu, x);
        if (p.j < 0.0)
            lo = x;
        else
            hi = x;
    }
    std::ostringstream os;
    os << "bessel zero: no convergence for nu = " << nu << " in [" << a << ", " << b << "], last x = " << x
       << ", J = " << p.j;
    throw AccuracyError(os.str());
}

inline BesselPair refine_bessel_zero(double nu, double a, double b) {
    return refine_bessel_zero(nu, a, b, bessel_j(nu, a), bessel_j(nu, b));
}

/// First zero of J_nu strictly above `from`, found by stepping until J
/// changes sign. `from` must not itself be within 1 of two zeros; the zero
/// spacing of J_nu exceeds 3 for every nu >= 0, so a unit step never
/// straddles two zeros.
inline BesselPair next_bessel_zero(double nu, double from) {
    constexpr double step = 1.0;
    double a = from;
    double fa = bessel_j(nu, a);
    for (int it = 0; it < 100000; ++it) {
        const double b = a + step;
        const double fb = bessel_j(nu, b);
        if (fb == 0.0 || (fa > 0.0) != (fb > 0.0)) return refine_bessel_zero(nu, a, b, fa, fb);
        a = b;
        fa = fb;
    }
    throw AccuracyError("bessel zero: scan did not find a sign change");
}

}  // namespace detail

/// k-th positive zero j_{nu,k} of J_nu (k >= 1).
inline double bessel_zero(double nu, int k) {
    if (!(nu >= 0.0)) throw DomainError("bessel_zero: nu must be >= 0");
    if (k < 1) throw DomainError("bessel_zero: k must be >= 1");
    // J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > nu.
    double from = std::max(nu, 1e-3);
    double z = 0.0;
    for (int i = 1; i <= k; ++i) {
        z = detail::next_bessel_zero(nu, from).j;
        from = z + 0.5;
    }
    return z;
}

/// Zeros of J_{l + offset}, l = 0, 1, 2, ..., for offset 0 (disk) or 1/2
/// (ball), grown on demand. Rows are filled from the interlacing
/// j_{nu,k} < j_{nu+1,k} < j_{nu,k+1}, falling back to a scan past the last
/// known zero. Snapshots are immutable, so readers need no lock.
class BesselZeroTable {
public:
    struct Zero {
        double j;       // j_{nu,k}
        double j_next;  // J_{nu+1}(j_{nu,k}) = -J_nu'(j_{nu,k})
    };
    using Rows = std::vector<std::vector<Zero>>;

    explicit BesselZeroTable(double offset) : offset_(offset), rows_(std::make_shared<Rows>()) {}

    double offset() const { return offset_; }

    /// Snapshot in which every row l holds all zeros <= jmax plus the first
    /// zero above jmax, for all l with j_{l,1} <= jmax, plus one extra row
    /// whose first zero exceeds jmax. Rows stop at max_rows.
    std::shared_ptr<const Rows> ensure(double jmax, std::size_t max_rows) {
        std::lock_guard lock(mutex_);
        if (covered_ >= jmax && rows_cap_ >= max_rows) return rows_;
        auto next = std::make_shared<Rows>(*rows_);
        Rows& rows = *next;
        for (std::size_t l = 0; l < max_rows; ++l) {
            if (rows.size() <= l) rows.emplace_back();
            auto& row = rows[l];
            while (row.empty() || row.back().j <= jmax) extend_row(rows, l);
            if (row.front().j > jmax) break;
        }
        rows_ = next;
        covered_ = std::max(covered_, jmax);
        rows_cap_ = std::max(rows_cap_, max_rows);
        return rows_;
    }

    static BesselZeroTable& disk() {
        static BesselZeroTable table(0.0);
        return table;
    }
    static BesselZeroTable& ball() {
        static BesselZeroTable table(0.5);
        return table;
    }

private:
    void extend_row(Rows& rows, std::size_t l) {
        auto& row = rows[l];
        const double nu = double(l) + offset_;
        const std::size_t k = row.size();  // 0-based index of the zero to find
        if (l == 0 && offset_ == 0.5) {
            // J_{1/2}(x) is proportional to sin x.
            const double z = kPi * double(k + 1);
            row.push_back({z, bessel_j(1.5, z)});
            return;
        }
        if (l > 0) {
            const auto& prev = rows[l - 1];
            if (prev.size() >= k + 2) {
                // J_{nu}(j_{nu-1,k}) is the stored J_{(nu-1)+1} value.
                const auto z = detail::refine_bessel_zero(nu, prev[k].j, prev[k + 1].j, prev[k].j_next,
                                                          prev[k + 1].j_next);
                row.push_back({z.j, z.j_next});
                return;
            }
        }
        const double from = row.empty() ? std::max(nu, 1e-3) : row.back().j + 0.5;
        const auto z = detail::next_bessel_zero(nu, from);
        row.push_back({z.j, z.j_next});
    }

    double offset_;
    std::mutex mutex_;
    std::shared_ptr<const Rows> rows_;
    double covered_ = 0.0;
    std::size_t rows_cap_ = 0;
};

}  // namespace bhk
