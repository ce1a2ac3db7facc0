#pragma once

// Monte Carlo evaluation of k_B through the Hunt formula
//
//   k_B(t,x,y) = k(t,x,y) - E^x[ tau < t ; k(t - tau, W(tau), y) ],
//
// W a Brownian motion with generator the Laplacian (variance 2 per
// coordinate per unit time) and tau its exit time from the ball.
//
// Paths take Euler steps of length clamp(delta(a)^2 / 64, dt, t - s). A step
// a -> b exits if b leaves the ball, or, with bridge correction on, with
// probability exp(-delta(a) delta(b) / h), the chance that a Brownian bridge
// of duration h crosses a plane at distances delta(a), delta(b) from its
// endpoints. On exit the crossing time is drawn from the first-passage law
// of the bridge through the plane tangent to the sphere at the endpoint
// nearer the boundary (d_a, d_b the distances to that plane):
// u ~ InverseGaussian(d_a h / |d_b|, d_a^2 / 2) and tau = s + u h / (h + u).
// Tangential coordinates at tau come from the bridge and the exit point is
// projected radially onto the sphere.
//
// Paths are grouped in fixed chunks, each with its own generator seeded from
// (seed, chunk index); chunk sums are combined in index order, so the result
// does not depend on the thread count.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bhk/error.hpp"
#include "bhk/geometry.hpp"
#include "bhk/kernels.hpp"
#include "bhk/numeric.hpp"
#include "bhk/series.hpp"

namespace bhk {

struct McConfig {
    std::uint64_t n_paths = 100000;
    double dt = 0.0;  // 0 selects t / 2048
    std::uint64_t seed = 1;
    bool bridge_correction = true;

    void validate() const {
        if (n_paths < 1) throw UsageError("McConfig: n_paths must be >= 1");
        if (!(dt >= 0.0)) throw UsageError("McConfig: dt must be >= 0");
    }
};

namespace detail {

inline constexpr std::uint64_t kMcChunk = 4096;

/// Michael-Schucany-Haas sampler for InverseGaussian(mu, lambda).
template <class Rng>
double sample_inverse_gaussian(double mu, double lambda, Rng& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    const double v = normal(rng);
    const double y = v * v;
    const double x = mu + mu * mu * y / (2.0 * lambda) -
                     mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    return uniform(rng) <= mu / (mu + x) ? x : mu * mu / x;
}

struct ChunkSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t steps = 0;
};

}  // namespace detail

inline OracleResult mc_kernel(double t, const Point& x, const Point& y, const McConfig& cfg = {}) {
    cfg.validate();
    if (!(t > 0.0)) throw DomainError("mc_kernel: t must be > 0");
    x.check_dim(y);
    if (!(x.norm() < 1.0) || !(y.norm() < 1.0)) throw DomainError("mc_kernel: x and y must lie in the open unit ball");
    const double dt = cfg.dt > 0.0 ? cfg.dt : t / 2048.0;
    if (dt > t) throw UsageError("McConfig: dt must not exceed t");

    const std::size_t n = x.dim();
    const std::uint64_t chunks = (cfg.n_paths + detail::kMcChunk - 1) / detail::kMcChunk;
    std::vector<detail::ChunkSums> sums(chunks);

    parallel_for(chunks, [&](std::size_t c) {
        std::uint64_t state = cfg.seed ^ (0x5851F42D4C957F2Dull * (c + 1));
        std::mt19937_64 rng(splitmix64(state));
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> uniform;
        const std::uint64_t first = c * detail::kMcChunk;
        const std::uint64_t last = std::min(cfg.n_paths, first + detail::kMcChunk);
        std::vector<double> a(n), b(n), nrm(n);
        detail::ChunkSums& out = sums[c];

        for (std::uint64_t p = first; p < last; ++p) {
            for (std::size_t i = 0; i < n; ++i) a[i] = x[i];
            double s = 0.0;
            double killed = 0.0;
            while (s < t) {
                double ra2 = 0.0;
                for (double v : a) ra2 += v * v;
                const double da = 1.0 - std::sqrt(ra2);
                const double h = std::min(std::max(da * da / 64.0, dt), t - s);
                const double sd = std::sqrt(2.0 * h);
                double rb2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    b[i] = a[i] + sd * normal(rng);
                    rb2 += b[i] * b[i];
                }
                ++out.steps;
                const double rb = std::sqrt(rb2);

                // Plane tangent at the endpoint nearer the sphere.
                const bool use_b = rb2 >= ra2;
                const double rn = use_b ? rb : std::sqrt(ra2);
                for (std::size_t i = 0; i < n; ++i) nrm[i] = (use_b ? b[i] : a[i]) / rn;
                double a_dot = 0.0, b_dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    a_dot += a[i] * nrm[i];
                    b_dot += b[i] * nrm[i];
                }
                const double d_a = 1.0 - a_dot;
                const double d_b = 1.0 - b_dot;

                bool exited = rb >= 1.0;
                if (!exited && cfg.bridge_correction)
                    exited = uniform(rng) < std::exp(-da * (1.0 - rb) / h);
                if (!exited) {
                    a.swap(b);
                    s += h;
                    continue;
                }

                double frac;
                if (d_a <= 0.0) {
                    frac = 0.0;
                } else {
                    const double u = detail::sample_inverse_gaussian(d_a * h / std::abs(d_b), 0.5 * d_a * d_a, rng);
                    frac = std::isfinite(u) ? u / (h + u) : 1.0;
                }
                const double tau = s + frac * h;
                // Bridge value of the tangential part at tau; normal part on the plane.
                const double bridge_sd = std::sqrt(2.0 * h * frac * (1.0 - frac));
                double w2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double ta = a[i] - a_dot * nrm[i];
                    const double tb = b[i] - b_dot * nrm[i];
                    b[i] = ta + frac * (tb - ta) + bridge_sd * normal(rng);
                }
                double tan_dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) tan_dot += b[i] * nrm[i];
                for (std::size_t i = 0; i < n; ++i) {
                    b[i] += (1.0 - tan_dot) * nrm[i];
                    w2 += b[i] * b[i];
                }
                const double wn = std::sqrt(w2);
                for (std::size_t i = 0; i < n; ++i) b[i] /= wn;
                if (tau < t) {
                    double d2 = 0.0;
                    for (std::size_t i = 0; i < n; ++i) d2 += (b[i] - y[i]) * (b[i] - y[i]);
                    const double rem = t - tau;
                    killed = std::exp(-0.5 * double(n) * std::log(4.0 * kPi * rem) - d2 / (4.0 * rem));
                }
                break;
            }
            out.sum += killed;
            out.sum_sq += killed * killed;
        }
    });

    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t steps = 0;
    for (const auto& c : sums) {
        sum += c.sum;
        sum_sq += c.sum_sq;
        steps += c.steps;
    }
    const double m = double(cfg.n_paths);
    const double mean = sum / m;
    const double var = m > 1.0 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) : 0.0;
    OracleResult out;
    out.value = gauss_kernel(t, x, y) - mean;
    out.err = std::sqrt(var / m);
    out.work.paths = cfg.n_paths;
    out.work.steps = steps;
    return out;
}

}  // namespace bhk
