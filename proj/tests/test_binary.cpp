#include <gtest/gtest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "popeq/binary.hpp"
#include "popeq/error.hpp"

using namespace popeq;

TEST(TwoSampleZ, ZeroNumerator) {
    EXPECT_DOUBLE_EQ(two_sample_z({30, 12, 12}).value, 0.0);
    EXPECT_FALSE(two_sample_z({30, 12, 12}).degenerate);
}

TEST(TwoSampleZ, FrozenValue) { EXPECT_NEAR(two_sample_z({20, 10, 5}).value, 1.6903085094570331, 1e-14); }

TEST(TwoSampleZ, Antisymmetric) {
    EXPECT_NEAR(two_sample_z({50, 30, 20}).value, 2.0412414523193148, 1e-14);
    EXPECT_DOUBLE_EQ(two_sample_z({50, 30, 20}).value, -two_sample_z({50, 20, 30}).value);
}

TEST(TwoSampleZ, DegenerateBoundaries) {
    for (auto y : {0, 20}) {
        const ZStatistic z = two_sample_z({20, y, y});
        EXPECT_TRUE(z.degenerate);
        EXPECT_DOUBLE_EQ(z.value, 0.0);
        EXPECT_DOUBLE_EQ(p_one_sided(z.value), 0.5);
    }
    EXPECT_EQ(two_sample_z({20, 20, 0}).value, INFINITY);
    EXPECT_EQ(two_sample_z({20, 0, 20}).value, -INFINITY);
    EXPECT_DOUBLE_EQ(p_one_sided(two_sample_z({20, 20, 0}).value), 0.0);
    EXPECT_DOUBLE_EQ(p_two_sided(two_sample_z({20, 0, 20}).value), 0.0);
}

TEST(TwoSampleZ, RejectsInvalidData) {
    EXPECT_THROW(two_sample_z({0, 0, 0}), DomainError);
    EXPECT_THROW(two_sample_z({10, 11, 0}), DomainError);
    EXPECT_THROW(two_sample_z({10, 0, -1}), DomainError);
}

TEST(PValues, Basics) {
    EXPECT_DOUBLE_EQ(p_one_sided(0.0), 0.5);
    EXPECT_DOUBLE_EQ(p_two_sided(0.0), 1.0);
    EXPECT_NEAR(p_one_sided(1.6449), 0.05, 1e-4);
    EXPECT_NEAR(p_one_sided(1.6449), 0.0499952174683463, 1e-14);
    EXPECT_DOUBLE_EQ(p_two_sided(0.7), p_two_sided(-0.7));
    for (double z : {-3.1, -0.2, 0.4, 2.2}) {
        EXPECT_NEAR(p_two_sided(z), two_sided_from_one(p_one_sided(z)), 1e-15);
    }
    EXPECT_THROW(p_one_sided(NAN), DomainError);
}

TEST(BetaPosterior, Updates) {
    const BetaParams none = beta_posterior({1, 1}, 0, 0);
    EXPECT_DOUBLE_EQ(none.a, 1.0);
    EXPECT_DOUBLE_EQ(none.b, 1.0);
    const BetaParams p = beta_posterior({0.2, 0.8}, 10, 50);
    EXPECT_DOUBLE_EQ(p.a, 10.2);
    EXPECT_DOUBLE_EQ(p.b, 40.8);
    const BetaParams all = beta_posterior({1, 1}, 30, 30);
    EXPECT_DOUBLE_EQ(all.a, 31.0);
    EXPECT_DOUBLE_EQ(all.b, 1.0);
    EXPECT_THROW(beta_posterior({1, 1}, 31, 30), DomainError);
    EXPECT_THROW(beta_posterior({0, 1}, 1, 30), DomainError);
}

TEST(ProbGreater, SymmetricPosteriors) {
    EXPECT_NEAR(prob_pE_greater_pS({3, 4}, {3, 4}), 0.5, 1e-12);
    EXPECT_NEAR(prob_pE_greater_pS({10.2, 40.8}, {10.2, 40.8}), 0.5, 1e-12);
    EXPECT_NEAR(prob_pE_greater_pS({0.2, 500.8}, {0.2, 500.8}), 0.5, 1e-10);
}

TEST(ProbGreater, Complementary) {
    const double a = prob_pE_greater_pS({11, 11}, {5, 17});
    const double b = prob_pE_greater_pS({5, 17}, {11, 11});
    EXPECT_NEAR(a + b, 1.0, 1e-12);
}

TEST(ProbGreater, FrozenValueAndMonteCarlo) {
    const double q = prob_pE_greater_pS({11, 11}, {5, 17});
    EXPECT_NEAR(q, 0.9741856842327555, 1e-10);  // mpmath double integral
    const oracle::MonteCarlo mc = oracle::beta_pair_greater(11, 11, 5, 17, 1000000, 99);
    EXPECT_NEAR(q, mc.mean, 0.002);
    EXPECT_LE(std::abs(q - mc.mean), 3.29 * mc.standard_error);
}

TEST(ProbGreater, ClosedFormUniform) {
    // Beta(2,1) vs Beta(1,1): Pr(X > Y) = E[1 - Y^2] = 2/3.
    EXPECT_NEAR(prob_pE_greater_pS({2, 1}, {1, 1}), 2.0 / 3.0, 1e-12);
}

TEST(ProbGreater, ExtremePosteriorsStayInRange) {
    const double v = prob_pE_greater_pS({500.2, 0.8}, {0.2, 500.8});
    EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
}

TEST(PopTwoSample, SymmetricDataGivesHalf) {
    EXPECT_NEAR(pop_one_two_sample({40, 13, 13}), 0.5, 1e-12);
    EXPECT_NEAR(pop_two_two_sample({40, 13, 13}), 1.0, 1e-11);
}

TEST(PopTwoSample, FrozenValue) {
    const double v = pop_one_two_sample({50, 25, 15});
    EXPECT_NEAR(v, 1.0 - prob_pE_greater_pS({25.2, 25.8}, {15.2, 35.8}), 1e-15);
    EXPECT_NEAR(v, 0.020037784326028086, 1e-10);
    const oracle::MonteCarlo mc = oracle::beta_pair_greater(25.2, 25.8, 15.2, 35.8, 1000000, 5);
    EXPECT_LE(std::abs((1.0 - v) - mc.mean), 3.29 * mc.standard_error);
}

TEST(PopTwoSample, DecreasingInYe) {
    double prev = 2.0;
    for (int ye = 0; ye <= 20; ++ye) {
        const double v = pop_one_two_sample({20, ye, 8});
        EXPECT_LT(v, prev) << ye;
        prev = v;
    }
}

TEST(PopTwoSample, TwoSidedIdentity) {
    const double one = pop_one_two_sample({100, 60, 45});
    EXPECT_NEAR(pop_two_two_sample({100, 60, 45}), 2.0 * std::min(one, 1.0 - one), 1e-15);
}

TEST(PopTwoSample, CloseToZTestAtLargeN) {
    const TwoArmPriors uniform{{1, 1}, {1, 1}};
    const double pop2 = pop_two_two_sample({500, 120, 90}, uniform);
    EXPECT_NEAR(pop2, p_two_sided(two_sample_z({500, 120, 90}).value), 0.01);
}

TEST(PopTwoSample, NormalApproximationAtLargeN) {
    for (int ye = 50; ye <= 450; ye += 40) {
        for (int ys = 50; ys <= 450; ys += 40) {
            const TwoArmBinomialData d{500, ye, ys};
            EXPECT_NEAR(pop_one_normal_approximation(d), pop_one_two_sample(d), 0.02) << ye << " " << ys;
        }
    }
}

TEST(PopTwoSample, ReportIsConsistent) {
    const TestReport r = two_sample_report({20, 10, 5});
    ASSERT_TRUE(r.statistic.has_value());
    EXPECT_NEAR(*r.statistic, 1.6903085094570331, 1e-14);
    EXPECT_NEAR(r.p_two, 2.0 * std::min(r.p_one, 1.0 - r.p_one), 1e-15);
    EXPECT_NEAR(r.pop_two, 2.0 * std::min(r.pop_one, 1.0 - r.pop_one), 1e-15);
}

TEST(ExactBinomial, OneSided) {
    EXPECT_DOUBLE_EQ(exact_binomial_p_one({20, 0, 0.2}), 1.0);
    EXPECT_NEAR(exact_binomial_p_one({20, 4, 0.2}), 0.5886, 1e-4);
    EXPECT_NEAR(exact_binomial_p_one({20, 20, 0.2}), 1.048576e-14, 1e-26);
}

TEST(ExactBinomial, TwoSidedDoubledTail) {
    EXPECT_DOUBLE_EQ(exact_binomial_p_two({20, 4, 0.2}), 1.0);
    EXPECT_NEAR(exact_binomial_p_two({100, 35, 0.2}), 2.0 * 0.0003360871616362259, 1e-16);
    EXPECT_NEAR(exact_binomial_p_two({100, 35, 0.2}), 2.0 * binomial_upper_tail(35, 100, 0.2), 1e-18);
}

TEST(ExactBinomial, TwoSidedMinimumLikelihood) {
    // scipy.stats.binomtest(...).pvalue
    const auto ml = TwoSidedBinomialMethod::minimum_likelihood;
    EXPECT_NEAR(exact_binomial_p_two({20, 4, 0.2}, ml), 1.0, 1e-12);
    EXPECT_NEAR(exact_binomial_p_two({100, 35, 0.2}, ml), 0.00041405076369035315, 1e-15);
    EXPECT_NEAR(exact_binomial_p_two({30, 2, 0.3}, ml), 0.004237868899540842, 1e-15);
}

TEST(ExactBinomial, MethodNames) {
    EXPECT_EQ(parse_two_sided_method("doubled-tail"), TwoSidedBinomialMethod::doubled_tail);
    EXPECT_EQ(parse_two_sided_method(to_string(TwoSidedBinomialMethod::minimum_likelihood)),
              TwoSidedBinomialMethod::minimum_likelihood);
    EXPECT_THROW(parse_two_sided_method("mid-p"), ConfigError);
}

TEST(ExactBinomial, RejectsInvalidData) {
    EXPECT_THROW(exact_binomial_p_one({20, 21, 0.2}), DomainError);
    EXPECT_THROW(exact_binomial_p_one({20, 2, 0.0}), DomainError);
    EXPECT_THROW(exact_binomial_p_one({20, 2, 1.0}), DomainError);
}

TEST(PopOneSample, NoDataGivesPriorCdf) {
    EXPECT_NEAR(pop_one_sample({0, 0, 0.2}).pop_one, 0.2, 1e-15);
    EXPECT_NEAR(pop_one_sample({0, 0, 0.37}).pop_one, 0.37, 1e-15);
}

TEST(PopOneSample, FrozenValue) {
    const PosteriorTail t = pop_one_sample({20, 4, 0.2});
    EXPECT_NEAR(t.pop_one, 0.4139916164865511, 1e-13);
    EXPECT_NEAR(t.pop_two, 2.0 * std::min(t.pop_one, 1.0 - t.pop_one), 1e-15);
    // Monte Carlo: Pr(Beta(5,17) <= 0.2).
    std::mt19937_64 rng(3);
    std::gamma_distribution<double> ga(5.0, 1.0), gb(17.0, 1.0);
    int hits = 0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
        const double x = ga(rng);
        hits += x / (x + gb(rng)) <= 0.2;
    }
    EXPECT_NEAR(t.pop_one, static_cast<double>(hits) / draws, 0.002);
}

TEST(PopOneSample, DecreasingInYe) {
    double prev = 2.0;
    for (int ye = 0; ye <= 50; ++ye) {
        const double v = pop_one_sample({50, ye, 0.2}).pop_one;
        EXPECT_LT(v, prev) << ye;
        prev = v;
    }
}

TEST(OneSampleReport, HasNoStatistic) {
    const TestReport r = one_sample_report({20, 4, 0.2});
    EXPECT_FALSE(r.statistic.has_value());
    EXPECT_NEAR(r.p_one, 0.5885511380434315, 1e-14);
    EXPECT_DOUBLE_EQ(r.p_two, 1.0);
}
