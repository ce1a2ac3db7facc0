#include <cmath>

#include <gtest/gtest.h>

#include "bhk/kernels.hpp"

using namespace bhk;

TEST(GaussKernel, Values) {
    EXPECT_NEAR(gauss_kernel(1.0 / (4.0 * kPi), Point{0.3, 0.1}, Point{0.3, 0.1}), 1.0, 1e-15);
    EXPECT_NEAR(gauss_kernel(0.25, Point{0.0, 0.0}, Point{1.0, 0.0}), std::exp(-1.0) / kPi, 1e-16);
    EXPECT_NEAR(gauss_kernel(0.25, Point{0.0, 0.0}, Point{1.0, 0.0}), 0.1170996, 1e-7);
}

TEST(GaussKernel, Symmetric) {
    const Point x{0.1, -0.4, 0.3}, y{0.6, 0.2, -0.1};
    EXPECT_EQ(gauss_kernel(0.07, x, y), gauss_kernel(0.07, y, x));
}

TEST(GaussKernel, NonPositiveTimeThrows) {
    EXPECT_THROW(gauss_kernel(0.0, Point{0.0, 0.0}, Point{0.0, 0.0}), DomainError);
    EXPECT_THROW(gauss_kernel(-1.0, Point{0.0, 0.0}, Point{0.0, 0.0}), DomainError);
}

TEST(HalfspaceKernel, Values) {
    const HalfSpace H(Point{1.0, 0.0}, 1.0);
    const Point x{0.5, 0.0};
    EXPECT_NEAR(halfspace_kernel(0.25, x, x, H), (1.0 - std::exp(-1.0)) / kPi, 1e-16);
    EXPECT_NEAR(halfspace_kernel(0.25, x, x, H), 0.2012128, 5e-6);
    EXPECT_EQ(halfspace_kernel(0.25, Point{1.0, 0.3}, x, H), 0.0);
}

TEST(HalfspaceKernel, BelowFreeKernelAndOutsideThrows) {
    const HalfSpace H(Point{0.0, 1.0}, 0.8);
    const Point x{0.2, 0.1}, y{-0.3, 0.5};
    for (double t : {1e-3, 0.01, 0.1, 1.0}) {
        const double kh = halfspace_kernel(t, x, y, H);
        EXPECT_GE(kh, 0.0);
        EXPECT_LE(kh, gauss_kernel(t, x, y));
    }
    EXPECT_THROW(halfspace_kernel(0.1, Point{0.0, 0.9}, y, H), DomainError);
}

TEST(Thm1Approx, Values) {
    const Point x{0.5, 0.0};
    const double expected = std::pow(1.0 - std::exp(-5.0), 2) / (0.4 * kPi);
    EXPECT_NEAR(thm1_approx(0.1, x, x).value, expected, 1e-15);
    EXPECT_NEAR(thm1_approx(0.1, x, x).value, 0.785087067863709, 1e-14);
    EXPECT_NEAR(thm1_approx(0.1, x, x).value, 0.785075, 2e-5);
    EXPECT_EQ(thm1_approx(0.1, Point{1.0, 0.0}, x).value, 0.0);
    EXPECT_EQ(thm1_approx(0.1, x, x).regime, Regime::thm1_boundary);
}

TEST(Thm1Approx, OriginThrows) {
    EXPECT_THROW(thm1_approx(0.1, Point{0.0, 0.0}, Point{0.5, 0.0}), DegenerateGeometryError);
}

TEST(Thm2Approx, Values) {
    const Point x{0.99, 0.0}, y{0.99 * std::cos(0.01), 0.99 * std::sin(0.01)};
    const double t = 0.01;
    const double k = gauss_kernel(t, x, y);
    const double w = delta_ball(x) * delta_ball(y) / t;
    EXPECT_NEAR(w, 0.01, 1e-14);
    EXPECT_NEAR(thm2_approx(t, x, y, Thm2Variant::linear).value, w * k, 1e-15 * k);
    EXPECT_NEAR(thm2_approx(t, x, y, Thm2Variant::exponential).value, -std::expm1(-w) * k, 1e-15 * k);
    EXPECT_EQ(thm2_approx(t, Point{0.0, 1.0}, y).value, 0.0);
}

TEST(VdbCorrection, Values) {
    const Point x{0.0, 0.0};
    // rho = 1, w = 1/t = 10, n = 2: e^{-10} (2 + 4 w).
    EXPECT_NEAR(vdb_correction(0.1, x, x), std::exp(-10.0) * 42.0, 1e-18);
    const Point y{0.2, 0.1, -0.3};
    EXPECT_NEAR(vdb_lower_bound(1e-4, y, y), gauss_kernel(1e-4, y, y), 1e-12 * gauss_kernel(1e-4, y, y));
    EXPECT_LE(vdb_lower_bound(0.05, y, y), gauss_kernel(0.05, y, y));
    EXPECT_GE(vdb_lower_bound(1.0, y, y), 0.0);
}

TEST(MsEstimate, Values) {
    // delta(y) = 1 - sqrt(0.82) is just below 0.1, so the last factor is just below 1.
    const double dy = 1.0 - std::sqrt(0.82);
    EXPECT_NEAR(ms_estimate_h(0.001, Point{0.9, 0.0}, Point{0.9, 0.1}), 1.0 + dy * 0.01 / 0.001, 1e-12);
    EXPECT_NEAR(ms_estimate_h(0.001, Point{0.9, 0.0}, Point{0.9, 0.1}), 2.0, 0.06);
    const Point x{0.7, 0.0};
    EXPECT_NEAR(ms_estimate_h(0.5, x, x), 0.09 / 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(ms_estimate_h(0.01, x, x), 1.0);
}

TEST(HittingDensityApprox, NearAndFarField) {
    const Point x{0.5, 0.0}, z{1.0, 0.0};
    const double t = 0.01;
    const double k = gauss_kernel(t, x, z);
    const double far = hitting_density_approx(t, x, z, {}, HittingRegime::far_field).value;
    EXPECT_NEAR(far, -std::expm1(-2.0 * 0.5 * 0.25 / t) * (2.0 * 0.25 / t) * k, 1e-14 * far);
    EXPECT_EQ(hitting_density_approx(t, x, z).regime, Regime::thm1_boundary);
    const double near = hitting_density_approx(t, x, z, {}, HittingRegime::near_field).value;
    EXPECT_NEAR(near, 0.5 / t * k, 1e-14 * near);
    EXPECT_EQ(hitting_density_approx(t, Point{0.0, 1.0}, z, {}, HittingRegime::near_field).value, 0.0);
}

TEST(HittingDensityApprox, OffBoundaryThrows) {
    EXPECT_THROW(hitting_density_approx(0.01, Point{0.5, 0.0}, Point{0.9, 0.0}), DomainError);
}

TEST(OneMinusExpRatio, Values) {
    EXPECT_EQ(one_minus_exp_ratio_bound(1.5, 1.5, 0.5).lhs, 0.0);
    const RatioBound b = one_minus_exp_ratio_bound(2.0, 1.0, 1.0 / 3.0);
    EXPECT_NEAR(b.lhs, (std::exp(-1.0) - std::exp(-2.0)) / (1.0 - std::exp(-1.0)), 1e-15);
    EXPECT_NEAR(b.lhs, 0.367879, 1e-6);
    EXPECT_DOUBLE_EQ(b.rhs_scale, 1.0);
}

TEST(OneMinusExpRatio, BadInputsThrow) {
    EXPECT_THROW(one_minus_exp_ratio_bound(0.0, 1.0, 0.1), DomainError);
    EXPECT_THROW(one_minus_exp_ratio_bound(1.0, -1.0, 0.1), DomainError);
    EXPECT_THROW(one_minus_exp_ratio_bound(1.0, 1.0, 2.0), DomainError);
}

TEST(RegimeSelect, Examples) {
    EXPECT_EQ(regime_select(0.01, Point{0.0, 0.0}, Point{0.0, 0.0}), Regime::interior);
    EXPECT_EQ(regime_select(1e-4, Point{0.8, 0.0}, Point{0.8, 0.0}), Regime::thm1_boundary);
    EXPECT_EQ(regime_select(0.01, Point{0.999, 0.0}, Point{0.999, 0.0}), Regime::thm2_boundary);
    EXPECT_EQ(regime_select(0.3, Point{0.9, 0.0}, Point{0.9, 0.0}), Regime::oracle_fallback);
}

TEST(RegimeSelect, InvalidConfigThrows) {
    RegimeConfig cfg;
    cfg.m2_thm2 = 10.0;
    EXPECT_THROW(regime_select(0.01, Point{0.0, 0.0}, Point{0.0, 0.0}, cfg), UsageError);
}

TEST(KernelEval, Dispatch) {
    const Point c{0.0, 0.0};
    const KernelEstimate in = kernel_eval(0.01, c, c);
    EXPECT_EQ(in.regime, Regime::interior);
    EXPECT_GE(in.value, vdb_lower_bound(0.01, c, c));
    EXPECT_LE(in.value, gauss_kernel(0.01, c, c));

    const Point b{0.8, 0.0};
    EXPECT_EQ(kernel_eval(1e-4, b, b).value, thm1_approx(1e-4, b, b).value);

    const Point e{0.999, 0.0};
    EXPECT_EQ(kernel_eval(0.01, e, e).value, thm2_approx(0.01, e, e).value);

    const Point f{0.9, 0.0};
    const KernelEstimate fb = kernel_eval(0.3, f, f);
    EXPECT_EQ(fb.regime, Regime::oracle_fallback);
    const OracleResult o = series_kernel(0.3, f, f);
    EXPECT_NEAR(fb.value, o.value, o.err);
}

TEST(Kernels, RotationInvariance) {
    const Point x{0.7, 0.1}, y{0.5, 0.45};
    const double c = std::cos(1.9), s = std::sin(1.9);
    auto rot = [&](const Point& p) { return Point{c * p[0] - s * p[1], s * p[0] + c * p[1]}; };
    for (double t : {1e-3, 0.02}) {
        EXPECT_NEAR(thm1_approx(t, x, y).value, thm1_approx(t, rot(x), rot(y)).value,
                    1e-12 * thm1_approx(t, x, y).value);
        EXPECT_NEAR(thm1_approx(t, x, y).value, thm1_approx(t, y, x).value, 1e-14 * thm1_approx(t, x, y).value);
        EXPECT_NEAR(ms_estimate_h(t, x, y), ms_estimate_h(t, rot(x), rot(y)), 1e-12);
    }
}
