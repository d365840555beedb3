#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>
#include <random>
#include <vector>

#include "popeq/error.hpp"
#include "popeq/multivariate.hpp"

using namespace popeq;

namespace {

Matrix corr2(double r) {
    Matrix m(2, 2);
    m << 1.0, r, r, 1.0;
    return m;
}

Matrix random_spd(std::mt19937_64& rng, int p) {
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = z(rng);
    return a * a.transpose() + 0.5 * Matrix::Identity(p, p);
}

}  // namespace

TEST(Sasabuchi, ZeroMean) {
    const MvnSample s{25, Vector::Zero(3), Matrix::Identity(3, 3)};
    for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(sasabuchi_z(s, Vector::Unit(3, k)), 0.0);
}

TEST(Sasabuchi, IdentityReducesToUnivariate) {
    Vector xbar(3);
    xbar << 0.1, -0.2, 0.05;
    const MvnSample s{64, xbar, Matrix::Identity(3, 3)};
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(sasabuchi_z(s, Vector::Unit(3, k)), 8.0 * xbar[k], 1e-14);
}

TEST(Sasabuchi, FrozenValue) {
    Vector xbar(2);
    xbar << 0.2, 0.1;
    Vector c(2);
    c << 1.0, -1.0;
    EXPECT_NEAR(sasabuchi_z({100, xbar, corr2(0.3)}, c), 0.8451542547285167, 1e-14);
}

TEST(Sasabuchi, ScaleInvariant) {
    Vector xbar(2);
    xbar << 0.2, 0.1;
    const MvnSample s{100, xbar, corr2(0.3)};
    Vector c(2);
    c << 1.0, 2.0;
    EXPECT_NEAR(sasabuchi_z(s, c), sasabuchi_z(s, 7.5 * c), 1e-14);
    const MvnPosterior post = mvn_posterior(MvnPrior::vague(2), s);
    EXPECT_NEAR(pop_contrast(post, c).pop_one, pop_contrast(post, 0.01 * c).pop_one, 1e-14);
}

TEST(Sasabuchi, RejectsInvalidInput) {
    const MvnSample s{10, Vector::Zero(2), corr2(0.3)};
    EXPECT_THROW(sasabuchi_z(s, Vector::Zero(2)), DomainError);
    EXPECT_THROW(sasabuchi_z(s, Vector::Ones(3)), DomainError);
    EXPECT_THROW(sasabuchi_z({10, Vector::Zero(2), corr2(1.5)}, Vector::Ones(2)), DomainError);
    Matrix asym = corr2(0.3);
    asym(0, 1) = 0.1;
    EXPECT_THROW(sasabuchi_z({10, Vector::Zero(2), asym}, Vector::Ones(2)), DomainError);
    EXPECT_THROW(sasabuchi_z({0, Vector::Zero(2), corr2(0.3)}, Vector::Ones(2)), DomainError);
}

TEST(Iut, Decisions) {
    const std::vector<double> one{0.03};
    EXPECT_TRUE(iut_decision(one, 0.05));
    const std::vector<double> single_fail{0.07};
    EXPECT_FALSE(iut_decision(single_fail, 0.05));
    const std::vector<double> blocked{0.01, 0.2};
    EXPECT_FALSE(iut_decision(blocked, 0.05));
    const std::vector<double> all{0.01, 0.03};
    EXPECT_TRUE(iut_decision(all, 0.05));
    EXPECT_THROW(iut_decision(std::vector<double>{}, 0.05), DomainError);
}

TEST(Iut, OneSidedRejectionImpliesEveryZAboveCritical) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.25, 0.2);
    const double crit = std_normal_quantile(0.95);
    for (int i = 0; i < 200; ++i) {
        Vector xbar(2);
        xbar << z(rng), z(rng);
        const MvnSample s{50, xbar, corr2(0.3)};
        const MvnReport r = mvn_report(s, ContrastSet::unit_vectors(2, 2), MvnPrior::vague(2), 0.05);
        if (r.reject_one_sided) {
            for (const TestReport& t : r.per_contrast) EXPECT_GT(*t.statistic, crit);
        }
    }
}

TEST(MvnPosterior, VaguePriorTracksSampleMean) {
    Vector xbar(2);
    xbar << 0.3, -0.2;
    const MvnPosterior post = mvn_posterior(MvnPrior::vague(2, 1000.0), {100, xbar, Matrix::Identity(2, 2)});
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(post.mu_n[k], xbar[k], 1e-3 * std::abs(xbar[k]));
}

TEST(MvnPosterior, DogmaticPriorKeepsPriorMean) {
    Vector mu0(2);
    mu0 << 1.0, 2.0;
    Vector xbar(2);
    xbar << -5.0, 5.0;
    const MvnPosterior post = mvn_posterior({mu0, 1e-10 * Matrix::Identity(2, 2)}, {10, xbar, corr2(0.3)});
    EXPECT_NEAR(post.mu_n[0], 1.0, 1e-8);
    EXPECT_NEAR(post.mu_n[1], 2.0, 1e-8);
}

TEST(MvnPosterior, MatchesDenseInverseOracle) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 2 + trial % 4;
        const int n = 5 + 7 * trial;
        const Matrix sigma = random_spd(rng, p);
        const Matrix sigma0 = random_spd(rng, p);
        Vector xbar(p), mu0(p);
        for (int i = 0; i < p; ++i) {
            xbar[i] = z(rng);
            mu0[i] = z(rng);
        }
        const MvnPosterior post = mvn_posterior({mu0, sigma0}, {n, xbar, sigma});
        // Precision-weighted form with explicit inverses.
        const Matrix prec = sigma0.inverse() + n * sigma.inverse();
        const Matrix cov = prec.inverse();
        const Vector mean = cov * (sigma0.inverse() * mu0 + n * sigma.inverse() * xbar);
        EXPECT_LE((post.mu_n - mean).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((post.sigma_n - cov).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_EQ(Eigen::LLT<Matrix>(post.sigma_n).info(), Eigen::Success);
        EXPECT_EQ((post.sigma_n - post.sigma_n.transpose()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(MvnPosterior, RejectsMismatchedPrior) {
    const MvnSample s{10, Vector::Zero(2), corr2(0.3)};
    EXPECT_THROW(mvn_posterior(MvnPrior::vague(3), s), DomainError);
    EXPECT_THROW(mvn_posterior({Vector::Zero(2), -Matrix::Identity(2, 2)}, s), DomainError);
}

TEST(PopContrast, ZeroMeanGivesHalf) {
    const MvnPosterior post{Vector::Zero(2), corr2(0.2)};
    const PosteriorTail t = pop_contrast(post, Vector::Unit(2, 0));
    EXPECT_DOUBLE_EQ(t.pop_one, 0.5);
    EXPECT_DOUBLE_EQ(t.pop_two, 1.0);
}

TEST(PopContrast, VagueLimitMatchesPValue) {
    Vector xbar(2);
    xbar << 0.15, -0.05;
    const MvnSample s{100, xbar, Matrix::Identity(2, 2)};
    const MvnPosterior post = mvn_posterior(MvnPrior::vague(2), s);
    for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(pop_contrast(post, Vector::Unit(2, k)).pop_one, 1.0 - std_normal_cdf(10.0 * xbar[k]), 0.002);
    }
}

TEST(PopContrast, MatchesMonteCarloOracle) {
    Vector xbar(2);
    xbar << 0.08, 0.12;
    const MvnSample s{100, xbar, corr2(0.3)};
    const MvnPosterior post = mvn_posterior(MvnPrior::vague(2), s);
    Vector c(2);
    c << 1.0, -0.5;
    const double pop = pop_contrast(post, c).pop_one;
    // Draw mu ~ N(mu_n, sigma_n) through a dense Cholesky factor.
    const Matrix l = post.sigma_n.llt().matrixL();
    std::mt19937_64 rng(12);
    std::normal_distribution<double> z(0.0, 1.0);
    const int draws = 1000000;
    int hits = 0;
    Vector e(2);
    for (int i = 0; i < draws; ++i) {
        e << z(rng), z(rng);
        hits += c.dot(post.mu_n + l * e) <= 0.0;
    }
    const double mc = static_cast<double>(hits) / draws;
    EXPECT_LE(std::abs(pop - mc), 3.29 * std::sqrt(mc * (1.0 - mc) / draws));
}

TEST(MvnReport, PerContrastFields) {
    Vector xbar(2);
    xbar << 0.3, 0.25;
    const MvnReport r =
        mvn_report({100, xbar, corr2(0.3)}, ContrastSet::unit_vectors(2, 2), MvnPrior::vague(2), 0.05);
    ASSERT_EQ(r.per_contrast.size(), 2u);
    EXPECT_TRUE(r.reject_one_sided);
    EXPECT_TRUE(r.reject_two_sided);
    for (const TestReport& t : r.per_contrast) {
        EXPECT_NEAR(t.p_two, 2.0 * std::min(t.p_one, 1.0 - t.p_one), 1e-15);
        EXPECT_NEAR(t.pop_one, t.p_one, 0.002);
    }
    EXPECT_THROW(ContrastSet::unit_vectors(2, 3), DomainError);
}
