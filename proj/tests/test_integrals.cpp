#include <cmath>

#include <gtest/gtest.h>

#include "bhk/integrals.hpp"

using namespace bhk;

namespace {

// Convolution of one-sided 1/2-stable densities:
// I_{3/2,3/2}(t,a,b) = sqrt(pi) (a+b)/(ab) t^{-3/2} e^{-(a+b)^2/t}.
double log_closed_form(double t, double a, double b) {
    return std::log(std::sqrt(kPi) * (a + b) / (a * b)) - 1.5 * std::log(t) - (a + b) * (a + b) / t;
}

}  // namespace

TEST(InverseGammaConv, ClosedFormAtUnitArguments) {
    const double v = inverse_gamma_conv_integral(1.0, 1.0, 1.0, 1.5, 1.5);
    EXPECT_NEAR(v / (2.0 * std::sqrt(kPi) * std::exp(-4.0)), 1.0, 1e-8);
    EXPECT_NEAR(v, 0.0649266, 1e-6);
}

TEST(InverseGammaConv, ClosedFormAcrossScales) {
    for (double t : {1e-3, 0.1, 10.0}) {
        for (double a : {0.01, 0.3, 2.0}) {
            for (double b : {0.05, 1.0}) {
                const LogValue lv = log_inverse_gamma_conv_integral(t, a, b, 1.5, 1.5);
                EXPECT_NEAR(lv.log_value, log_closed_form(t, a, b), 1e-8) << t << " " << a << " " << b;
                EXPECT_LE(lv.rel_err, 1e-10);
            }
        }
    }
}

TEST(InverseGammaConv, FrozenRegressionValue) {
    EXPECT_NEAR(inverse_gamma_conv_integral(1.0, 1.0, 1.0, 2.0, 2.0, 1e-12), 0.13737059303300198, 1e-12);
}

TEST(InverseGammaConv, SymmetricUnderSwap) {
    const double v1 = inverse_gamma_conv_integral(0.3, 0.2, 0.7, 1.6, 3.0);
    const double v2 = inverse_gamma_conv_integral(0.3, 0.7, 0.2, 3.0, 1.6);
    EXPECT_NEAR(v1 / v2, 1.0, 1e-9);
}

TEST(InverseGammaConv, BadArgumentsThrow) {
    EXPECT_THROW(inverse_gamma_conv_integral(0.0, 1.0, 1.0, 1.5, 1.5), DomainError);
    EXPECT_THROW(inverse_gamma_conv_integral(1.0, -1.0, 1.0, 1.5, 1.5), DomainError);
    EXPECT_THROW(inverse_gamma_conv_integral(1.0, 1.0, 1.0, 1.0, 1.5), DomainError);
    EXPECT_THROW(inverse_gamma_conv_integral(1.0, 1.0, 1.0, 1.5, 1.5, 0.0), UsageError);
}

TEST(EstintsShape, SymmetricUnderSwap) {
    for (double t : {1e-3, 1.0}) {
        const double s1 = log_estints_shape(t, 0.2, 0.9, 1.6, 2.0);
        const double s2 = log_estints_shape(t, 0.9, 0.2, 2.0, 1.6);
        EXPECT_NEAR(s1, s2, 1e-12 * std::abs(s1));
    }
}

TEST(EstintsShape, ComparableInSmallArgumentLimit) {
    for (double al : {1.6, 2.0, 3.0}) {
        for (double be : {1.6, 2.0, 3.0}) {
            const LogValue I = log_inverse_gamma_conv_integral(10.0, 0.01, 0.01, al, be);
            const double ratio = std::exp(I.log_value - log_estints_shape(10.0, 0.01, 0.01, al, be));
            EXPECT_GT(ratio, 1.0 / 20.0);
            EXPECT_LT(ratio, 20.0);
        }
    }
}

TEST(CkTail, ZeroRadiusFullSpaceIsFreeKernel) {
    const Point x{0.1, 0.2}, y{-0.3, 0.4};
    for (double alpha : {0.2, 0.5, 0.9}) {
        const CkTail c = ck_tail_check(0.1, alpha, 0.0, x, y, std::nullopt, 0.0, CkVariant::full_space);
        EXPECT_NEAR(c.lhs_over_k, 1.0, 1e-9);
        EXPECT_NEAR(c.lhs, gauss_kernel(0.1, x, y), 1e-9 * gauss_kernel(0.1, x, y));
    }
    const Point u{0.1, 0.2, 0.0}, v{0.0, -0.3, 0.4};
    const CkTail c3 = ck_tail_check(0.2, 0.3, 0.0, u, v, std::nullopt, 0.0, CkVariant::full_space);
    EXPECT_NEAR(c3.lhs_over_k, 1.0, 1e-9);
}

TEST(CkTail, TailDecaysFasterThanBound) {
    const HalfSpace H(Point{1.0, 0.0}, 1.0);
    const Point x{0.5, 0.0}, y{0.4, 0.1};
    const double t = 0.05, alpha = 0.5;
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {4.0, 16.0, 64.0, 256.0}) {
        const double r = std::sqrt(s * alpha * (1.0 - alpha) * t);
        const CkTail c = ck_tail_check(t, alpha, r, x, y, H, 1.0);
        const double q = c.lhs_over_k / std::exp(-s / 16.0);
        EXPECT_LT(q, prev);
        prev = q;
        EXPECT_LE(c.lhs, 10.0 * c.rhs_shape);
    }
    EXPECT_LT(prev, 1e-10);
}

TEST(CkTail, HalfspaceVariantsBelowFullSpace) {
    const HalfSpace H(Point{0.0, 1.0}, 1.0);
    const Point x{0.2, 0.3}, y{-0.1, 0.5};
    const double t = 0.1, alpha = 0.4, r = 0.1;
    const double full = ck_tail_check(t, alpha, r, x, y, std::nullopt, 0.0, CkVariant::full_space).lhs;
    const double kern = ck_tail_check(t, alpha, r, x, y, H, 0.0, CkVariant::halfspace_kernels).lhs;
    const double flat = ck_tail_check(t, alpha, r, x, y, H, 0.0, CkVariant::halfspace_weighted).lhs;
    EXPECT_LE(kern, flat * (1.0 + 1e-9));
    EXPECT_LE(flat, full * (1.0 + 1e-9));
}

TEST(CkTail, BadArgumentsThrow) {
    const Point x{0.1, 0.2};
    const HalfSpace H(Point{1.0, 0.0}, 1.0);
    EXPECT_THROW(ck_tail_check(0.1, 1.0, 0.0, x, x, H, 0.0), DomainError);
    EXPECT_THROW(ck_tail_check(0.1, 0.5, 0.0, x, x, std::nullopt, 0.0), UsageError);
    EXPECT_THROW(ck_tail_check(0.1, 0.5, 0.0, x, x, std::nullopt, 1.0, CkVariant::full_space), UsageError);
    EXPECT_THROW(ck_tail_check(0.1, 0.5, 0.0, Point{1.5, 0.0}, x, H, 0.0), DomainError);
}
