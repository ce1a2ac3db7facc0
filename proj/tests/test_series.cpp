#include <cmath>

#include <gtest/gtest.h>

#include "bhk/kernels.hpp"
#include "bhk/series.hpp"

using namespace bhk;

namespace {

SeriesConfig dim(int n) {
    SeriesConfig c;
    c.dimension = n;
    return c;
}

double survival(double t, const Point& x) {
    auto radial = [&](double r) {
        auto angular = [&](double phi) {
            return series_kernel(t, x, Point{r * std::cos(phi), r * std::sin(phi)}).value;
        };
        return r * integrate(angular, 0.0, 2.0 * kPi, 1e-7, 1e-300).value;
    };
    return integrate(radial, 0.0, 1.0 - 1e-12, 1e-6, 1e-300).value;
}

}  // namespace

TEST(SeriesKernel, DiskCentreAtUnitTime) {
    const Point c{0.0, 0.0};
    const OracleResult o = series_kernel(1.0, c, c);
    EXPECT_NEAR(o.value, 0.00363632629463951, 1e-15);
    EXPECT_LE(o.err, 1e-10 * o.value);
    // Leading mode alone: e^{-j^2} / (pi J_1(j)^2).
    const double j = bessel_zero(0.0, 1);
    const double lead = std::exp(-j * j) / (kPi * std::pow(bessel_j(1.0, j), 2));
    EXPECT_NEAR(o.value / lead, 1.0, 1e-3);
}

TEST(SeriesKernel, BallCentreMatchesSineSeries) {
    const Point c{0.0, 0.0, 0.0};
    for (double t : {0.02, 0.1, 0.5}) {
        double expected = 0.0;
        for (int k = 1; k < 400; ++k) expected += std::pow(k * kPi, 2) / (2.0 * kPi) * std::exp(-std::pow(k * kPi, 2) * t);
        const OracleResult o = series_kernel(t, c, c, dim(3));
        EXPECT_NEAR(o.value, expected, 1e-9 * expected) << "t = " << t;
    }
}

TEST(SeriesKernel, Symmetric) {
    const Point x{0.4, -0.3}, y{-0.1, 0.2};
    for (double t : {0.01, 0.1}) {
        const OracleResult a = series_kernel(t, x, y), b = series_kernel(t, y, x);
        EXPECT_NEAR(a.value, b.value, a.err + b.err);
    }
    const Point u{0.2, 0.5, -0.3}, v{-0.6, 0.1, 0.2};
    const OracleResult a = series_kernel(0.05, u, v, dim(3)), b = series_kernel(0.05, v, u, dim(3));
    EXPECT_NEAR(a.value, b.value, a.err + b.err);
}

TEST(SeriesKernel, DominatedByFreeKernel) {
    const Point pts[] = {Point{0.0, 0.0}, Point{0.5, 0.2}, Point{-0.9, 0.1}, Point{0.3, -0.75}};
    for (double t : {0.005, 0.05, 0.5}) {
        for (const auto& x : pts) {
            for (const auto& y : pts) {
                const double k = gauss_kernel(t, x, y);
                try {
                    const OracleResult o = series_kernel(t, x, y);
                    EXPECT_GE(o.value, -o.err);
                    EXPECT_LE(o.value, k + o.err);
                } catch (const AccuracyError&) {
                    // Only values buried in roundoff may be refused.
                    EXPECT_LT(k, 1e-8);
                }
            }
        }
    }
}

TEST(SeriesKernel, SurvivalBelowOneAndDecreasing) {
    const Point x{0.3, 0.0};
    const double s1 = survival(0.05, x), s2 = survival(0.1, x), s3 = survival(0.2, x);
    EXPECT_LE(s1, 1.0);
    EXPECT_GT(s1, s2);
    EXPECT_GT(s2, s3);
    EXPECT_GT(s3, 0.0);
}

TEST(SeriesKernel, ShortTimeSandwich) {
    const Point x{0.3, 0.0};
    const double t = 0.005;
    const OracleResult o = series_kernel(t, x, x);
    const double k = gauss_kernel(t, x, x);
    EXPECT_GE(o.value + o.err, vdb_lower_bound(t, x, x));
    EXPECT_LE(o.value - o.err, k);
    EXPECT_NEAR(o.value / k, 1.0, 1e-12);
}

TEST(SeriesKernel, AgreesWithThm1AtShortTime) {
    const Point x{0.8, 0.0};
    const double t = 1e-3;
    const OracleResult o = series_kernel(t, x, x);
    EXPECT_NEAR(thm1_approx(t, x, x).value / o.value, 1.0, 0.05);
}

TEST(SeriesKernel, ErrorsAndDomains) {
    const Point x{0.999, 0.0};
    SeriesConfig tight;
    tight.max_radial_modes = 20;
    tight.max_angular_modes = 20;
    EXPECT_THROW(series_kernel(1e-6, x, x, tight), AccuracyError);
    EXPECT_THROW(series_kernel(0.0, x, x), DomainError);
    EXPECT_THROW(series_kernel(0.1, Point{1.0, 0.0}, x), DomainError);
    EXPECT_THROW(series_kernel(0.1, Point{0.1, 0.0, 0.0}, Point{0.1, 0.0, 0.0}), DomainError);
    SeriesConfig bad;
    bad.dimension = 4;
    EXPECT_THROW(series_kernel(0.1, x, x, bad), UsageError);
}

TEST(HittingDensityOracle, RotationallyConstantFromCentre) {
    const Point c{0.0, 0.0};
    const double t = 0.1, h = 1e-3;
    const double ref = hitting_density_oracle(t, c, Point{1.0, 0.0}, h).value;
    EXPECT_GT(ref, 0.0);
    for (int i = 1; i < 8; ++i) {
        const double a = 2.0 * kPi * i / 8.0;
        const OracleResult q = hitting_density_oracle(t, c, Point{std::cos(a), std::sin(a)}, h);
        EXPECT_NEAR(q.value / ref, 1.0, 1e-6);
    }
}

TEST(HittingDensityOracle, PositiveAndComparableToApproximant) {
    const Point z{0.0, 1.0};
    for (double t : {0.01, 0.05}) {
        for (const Point& x : {Point{0.2, 0.5}, Point{-0.3, 0.8}, Point{0.4, 0.7}}) {
            const OracleResult q = hitting_density_oracle(t, x, z, 1e-3);
            EXPECT_GT(q.value, 0.0);
            const double approx = hitting_density_approx(t, x, z).value;
            EXPECT_GT(approx / q.value, 0.1);
            EXPECT_LT(approx / q.value, 10.0);
        }
    }
}

TEST(HittingDensityOracle, BadArgumentsThrow) {
    EXPECT_THROW(hitting_density_oracle(0.1, Point{0.0, 0.0}, Point{0.5, 0.0}, 1e-3), DomainError);
    EXPECT_THROW(hitting_density_oracle(0.1, Point{0.0, 0.0}, Point{1.0, 0.0}, 0.1), DomainError);
}
