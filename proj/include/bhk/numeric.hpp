#pragma once

// Small numerical utilities shared by the kernels, oracles and experiment
// harness.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "bhk/error.hpp"

namespace bhk {

inline constexpr double kPi = 3.14159265358979323846;

/// 1 - e^{-w}, accurate for tiny w.
inline double one_minus_exp(double w) { return -std::expm1(-w); }

/// n log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (n == 0 || !(lo > 0.0) || !(hi > 0.0)) throw UsageError("log_grid: need n >= 1 and positive bounds");
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// FNV-1a over the bit patterns of a sequence of doubles.
inline std::uint64_t fnv1a(const std::vector<double>& values) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double v : values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

/// Halton low-discrepancy sequence with a seeded Cranley-Patterson
/// rotation. Point i is independent of how many points are drawn, so a
/// run with N cases is a prefix of a run with 2N cases.
class Halton {
public:
    Halton(std::size_t dims, std::uint64_t seed) : shift_(dims) {
        static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
        if (dims > std::size(kPrimes)) throw UsageError("Halton: at most 16 dimensions");
        bases_.assign(kPrimes, kPrimes + dims);
        std::uint64_t s = seed;
        for (auto& v : shift_) v = double(splitmix64(s) >> 11) * 0x1.0p-53;
    }

    std::vector<double> point(std::uint64_t index) const {
        std::vector<double> u(bases_.size());
        for (std::size_t d = 0; d < bases_.size(); ++d) {
            double r = radical_inverse(index + 1, bases_[d]) + shift_[d];
            u[d] = r - std::floor(r);
        }
        return u;
    }

private:
    static double radical_inverse(std::uint64_t i, unsigned base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= base;
            r += f * double(i % base);
            i /= base;
        }
        return r;
    }
    std::vector<unsigned> bases_;
    std::vector<double> shift_;
};

/// Worker count from BHK_THREADS (unset or 0 means hardware concurrency).
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BHK_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return unsigned(v);
    }
    return hw;
}

/// Calls fn(i) for i in [0, n). Work is claimed dynamically, so callers
/// must write results into slot i only; aggregation order is then fixed.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = thread_count()) {
    threads = unsigned(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

struct Quadrature {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

struct GkSegment {
    double a, b, value, error;
    bool operator<(const GkSegment& o) const { return error < o.error; }
};

template <class F>
GkSegment gauss_kronrod15(F& f, double a, double b) {
    static constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.0};
    static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * wk[7], gauss = fc * wg[3];
    for (int i = 0; i < 7; ++i) {
        const double s = f(c - h * xk[i]) + f(c + h * xk[i]);
        kron += wk[i] * s;
        if (i % 2 == 1) gauss += wg[i / 2] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Kronrod on the finite interval [a, b].
/// Bisects the segment with the largest error estimate until the summed
/// estimate is below max(abs_tol, rel_tol * |I|). `error` is the summed
/// Kronrod-minus-Gauss estimate, a conservative bound for smooth integrands.
template <class F>
Quadrature integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                     std::size_t max_segments = 4000) {
    if (!(b > a)) return {0.0, 0.0};
    std::priority_queue<detail::GkSegment> heap;
    auto first = detail::gauss_kronrod15(f, a, b);
    double total = first.value, err = first.error;
    heap.push(first);
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && heap.size() < max_segments) {
        const auto worst = heap.top();
        if (worst.error <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(worst.value)) break;
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        const auto left = detail::gauss_kronrod15(f, worst.a, m);
        const auto right = detail::gauss_kronrod15(f, m, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {total, err};
}

}  // namespace bhk
