#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "popeq/error.hpp"
#include "popeq/numeric/special.hpp"

using namespace popeq;

TEST(NormalCdf, SymmetryPointIsOneHalf) { EXPECT_DOUBLE_EQ(std_normal_cdf(0.0), 0.5); }

TEST(NormalCdf, MatchesSeriesOracle) {
    EXPECT_NEAR(std_normal_cdf(1.959964), 0.975, 1e-6);
    for (double x = -8.0; x <= 8.0; x += 0.125) {
        EXPECT_NEAR(std_normal_cdf(x), static_cast<double>(oracle::normal_cdf(x)), 1e-14) << x;
    }
}

TEST(NormalCdf, Reflection) {
    EXPECT_NEAR(std_normal_cdf(-2.3), 1.0 - std_normal_cdf(2.3), 1e-15);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, 1e-14) << x;
    }
}

TEST(NormalCdf, SurvivalKeepsTailPrecision) {
    EXPECT_NEAR(std_normal_sf(10.0) / 7.619853024160525e-24, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(std_normal_sf(-3.0), std_normal_cdf(3.0));
}

TEST(NormalCdf, RejectsNonFinite) {
    EXPECT_THROW(std_normal_cdf(NAN), DomainError);
    EXPECT_THROW(std_normal_cdf(INFINITY), DomainError);
}

TEST(NormalQuantile, KnownValues) {
    EXPECT_DOUBLE_EQ(std_normal_quantile(0.5), 0.0);
    EXPECT_NEAR(std_normal_quantile(0.9), 1.2816, 1e-4);
    EXPECT_NEAR(std_normal_quantile(0.975), 1.9600, 1e-4);
    EXPECT_NEAR(std_normal_quantile(0.9), oracle::normal_quantile(0.9), 1e-12);
    EXPECT_NEAR(std_normal_quantile(0.975), 1.9599639845400543, 1e-12);
}

TEST(NormalQuantile, InvertsCdf) {
    for (double p : {1e-300, 1e-20, 1e-8, 0.001, 0.01, 0.2, 0.5, 0.77, 0.95, 0.999, 1.0 - 1e-10}) {
        EXPECT_NEAR(std_normal_cdf(std_normal_quantile(p)), p, 1e-10 * std::max(1.0, p)) << p;
    }
    for (double p : {1e-300, 1e-50, 1e-20}) {
        EXPECT_NEAR(std_normal_cdf(std_normal_quantile(p)) / p, 1.0, 1e-10) << p;
    }
}

TEST(NormalQuantile, RejectsOutOfRange) {
    EXPECT_THROW(std_normal_quantile(0.0), DomainError);
    EXPECT_THROW(std_normal_quantile(1.0), DomainError);
    EXPECT_THROW(std_normal_quantile(-0.1), DomainError);
    EXPECT_THROW(std_normal_quantile(NAN), DomainError);
}

TEST(IncompleteBeta, Endpoints) {
    EXPECT_DOUBLE_EQ(regularized_incomplete_beta(2.5, 3.5, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(regularized_incomplete_beta(2.5, 3.5, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(regularized_incomplete_beta(0.01, 300.0, 1.0), 1.0);
}

TEST(IncompleteBeta, UniformAndReflection) {
    EXPECT_NEAR(regularized_incomplete_beta(1.0, 1.0, 0.37), 0.37, 1e-15);
    EXPECT_NEAR(regularized_incomplete_beta(2.5, 3.5, 0.3) + regularized_incomplete_beta(3.5, 2.5, 0.7), 1.0,
                1e-14);
}

TEST(IncompleteBeta, ClosedForms) {
    // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1 - x)^b.
    for (double x : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999}) {
        for (double a : {0.1, 0.7, 3.0, 40.0, 250.0}) {
            const double expected = std::pow(x, a);
            EXPECT_NEAR(regularized_incomplete_beta(a, 1.0, x), expected, 1e-12 * expected + 1e-300) << a << " " << x;
            const double e2 = -std::expm1(a * std::log1p(-x));
            EXPECT_NEAR(regularized_incomplete_beta(1.0, a, x), e2, 1e-12 * e2) << a << " " << x;
        }
    }
}

TEST(IncompleteBeta, FrozenValues) {
    // mpmath betainc at 40 digits.
    EXPECT_NEAR(regularized_incomplete_beta(5.0, 17.0, 0.2), 0.4139916164865511, 1e-13);
}

TEST(IncompleteBeta, BinomialIdentity) {
    // Pr(Y >= y) for Y ~ Bin(n, p) equals I_p(y, n - y + 1).
    for (int n : {5, 20, 100}) {
        for (int y = 1; y <= n; y += std::max(1, n / 7)) {
            const double tail = binomial_upper_tail(y, n, 0.3);
            EXPECT_NEAR(regularized_incomplete_beta(y, n - y + 1.0, 0.3), tail, 1e-12 * tail + 1e-300);
        }
    }
}

TEST(IncompleteBeta, MonotoneInX) {
    for (auto [a, b] : {std::pair{0.02, 0.05}, std::pair{0.5, 0.5}, std::pair{3.0, 7.0}, std::pair{250.0, 400.0}}) {
        double prev = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double v = regularized_incomplete_beta(a, b, i / 1000.0);
            EXPECT_GE(v, prev) << a << " " << b << " " << i;
            prev = v;
        }
        EXPECT_DOUBLE_EQ(prev, 1.0);
    }
}

TEST(IncompleteBeta, RejectsOutOfDomain) {
    EXPECT_THROW(regularized_incomplete_beta(0.0, 1.0, 0.5), DomainError);
    EXPECT_THROW(regularized_incomplete_beta(1.0, -1.0, 0.5), DomainError);
    EXPECT_THROW(regularized_incomplete_beta(1.0, 1.0, 1.5), DomainError);
    EXPECT_THROW(regularized_incomplete_beta(1.0, 1.0, NAN), DomainError);
}

TEST(IncompleteBeta, ComplementUsesCarriedArgument) {
    const double x = 1e-20;
    EXPECT_NEAR(regularized_incomplete_beta_complement(2.0, 3.0, x, 1.0 - x), 1.0, 1e-15);
    // 1 - I_x(a, b) near x = 1 from the complementary argument.
    const double y = 1e-8;
    const double c = regularized_incomplete_beta_complement(2.0, 3.0, 1.0 - y, y);
    EXPECT_NEAR(c / 3.99999997e-24, 1.0, 1e-9);
}

TEST(StudentT, Symmetry) {
    for (double df : {0.5, 1.0, 3.0, 30.0, 1e5}) EXPECT_DOUBLE_EQ(student_t_cdf(0.0, df), 0.5);
}

TEST(StudentT, LargeDfApproachesNormal) {
    EXPECT_NEAR(student_t_cdf(1.5, 1e6), std_normal_cdf(1.5), 1e-6);
    EXPECT_DOUBLE_EQ(student_t_cdf(1.5, INFINITY), std_normal_cdf(1.5));
}

TEST(StudentT, FrozenValue) {
    EXPECT_NEAR(student_t_cdf(2.0, 5.0), 0.9490, 1e-4);
    EXPECT_NEAR(student_t_cdf(2.0, 5.0), 0.9490302605850708, 1e-12);
}

TEST(StudentT, AgreesWithAdaptiveQuadratureOracle) {
    int checked = 0;
    for (double df : {1.0, 2.5, 7.0, 30.0, 200.0}) {
        for (int i = 0; i < 10; ++i) {
            const double x = -6.0 + 12.0 * i / 9.0;
            EXPECT_NEAR(student_t_cdf(x, df), oracle::t_cdf(x, df), 1e-9) << x << " " << df;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 50);
}

TEST(StudentT, CauchyClosedForm) {
    for (double x : {-50.0, -2.0, -0.3, 0.7, 4.0}) {
        EXPECT_NEAR(student_t_cdf(x, 1.0), 0.5 + std::atan(x) / std::numbers::pi, 1e-14);
    }
}

TEST(StudentT, RejectsBadDf) {
    EXPECT_THROW(student_t_cdf(1.0, 0.0), DomainError);
    EXPECT_THROW(student_t_cdf(1.0, -2.0), DomainError);
    EXPECT_THROW(student_t_cdf(NAN, 2.0), DomainError);
}

TEST(Binomial, DegenerateAndNormalization) {
    EXPECT_DOUBLE_EQ(binomial_pmf(0, 17, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(binomial_pmf(17, 17, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(binomial_pmf(3, 17, 0.0), 0.0);
    for (int n : {1, 20, 500, 5000}) {
        for (double p : {0.001, 0.2, 0.5, 0.93}) {
            long double s = 0.0L;
            for (int y = 0; y <= n; ++y) s += binomial_pmf(y, n, p);
            EXPECT_NEAR(static_cast<double>(s), 1.0, 1e-12) << n << " " << p;
        }
    }
}

TEST(Binomial, TailFrozenValues) {
    EXPECT_NEAR(binomial_upper_tail(4, 20, 0.2), 0.5886, 1e-4);
    EXPECT_NEAR(binomial_upper_tail(4, 20, 0.2), 0.5885511380434315, 1e-14);
    EXPECT_NEAR(binomial_lower_tail(4, 20, 0.2), 0.629648263902669, 1e-14);
    EXPECT_NEAR(binomial_upper_tail(35, 100, 0.2), 0.0003360871616362259, 1e-17);
    EXPECT_DOUBLE_EQ(binomial_upper_tail(0, 20, 0.2), 1.0);
}

TEST(Binomial, UpperTailIsSumOfPmf) {
    for (int y = 0; y <= 30; ++y) {
        long double s = 0.0L;
        for (int k = y; k <= 30; ++k) s += binomial_pmf(k, 30, 0.37);
        EXPECT_NEAR(binomial_upper_tail(y, 30, 0.37), static_cast<double>(s), 1e-15);
    }
}

TEST(Binomial, MatchesExactRationalArithmetic) {
    for (int n = 0; n <= 30; ++n) {
        for (auto [num, den] : {std::pair{1, 5}, std::pair{3, 10}, std::pair{1, 2}, std::pair{9, 10}}) {
            const double p = static_cast<double>(num) / den;
            for (int y = 0; y <= n; ++y) {
                const double exact = oracle::binomial_pmf_exact(y, n, num, den);
                EXPECT_NEAR(binomial_pmf(y, n, p), exact, 1e-12 * std::max(exact, 1e-3)) << n << " " << y;
            }
        }
    }
}

TEST(Binomial, LargeNWithoutOverflow) {
    const double v = binomial_pmf(2500, 5000, 0.5);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(v, 0.011283227495479843, 1e-15);
}

TEST(Binomial, RejectsBadArguments) {
    EXPECT_THROW(binomial_pmf(21, 20, 0.2), DomainError);
    EXPECT_THROW(binomial_pmf(-1, 20, 0.2), DomainError);
    EXPECT_THROW(binomial_upper_tail(21, 20, 0.2), DomainError);
    EXPECT_THROW(binomial_pmf(2, 20, 1.2), DomainError);
}
