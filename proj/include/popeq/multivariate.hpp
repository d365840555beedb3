#pragma once

// Known-covariance multivariate normal mean: Sasabuchi's intersection-union
// tests on linear contrasts c_k' mu, and the conjugate normal posterior of mu.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "popeq/error.hpp"
#include "popeq/numeric/special.hpp"
#include "popeq/report.hpp"

namespace popeq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace detail {

inline void require_spd(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw DomainError(std::string(what) + ": matrix must be square and non-empty");
    }
    if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (scale > 0 ? scale : 1.0)) {
        throw DomainError(std::string(what) + ": matrix must be symmetric");
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DomainError(std::string(what) + ": matrix must be positive definite");
    }
}

}  // namespace detail

/// Sample mean of n draws from N_p(mu, sigma) with sigma known.
struct MvnSample {
    std::int64_t n = 1;
    Vector xbar;
    Matrix sigma;

    std::int64_t dim() const { return xbar.size(); }
};

inline void validate(const MvnSample& s) {
    if (s.n < 1) throw DomainError("MvnSample: n must be positive");
    if (s.xbar.size() == 0 || !s.xbar.allFinite()) throw DomainError("MvnSample: xbar must be finite");
    if (s.sigma.rows() != s.xbar.size()) throw DomainError("MvnSample: sigma dimension mismatch");
    detail::require_spd(s.sigma, "MvnSample.sigma");
}

/// K contrast vectors c_1..c_K.
struct ContrastSet {
    std::vector<Vector> contrasts;

    /// e_1, ..., e_k in dimension p.
    static ContrastSet unit_vectors(std::int64_t p, std::int64_t k) {
        if (k < 1 || k > p) throw DomainError("ContrastSet::unit_vectors: require 1 <= k <= p");
        ContrastSet set;
        for (std::int64_t i = 0; i < k; ++i) set.contrasts.push_back(Vector::Unit(p, i));
        return set;
    }
};

inline void validate(const ContrastSet& set, std::int64_t dim) {
    if (set.contrasts.empty()) throw DomainError("ContrastSet: need at least one contrast");
    for (const Vector& c : set.contrasts) {
        if (c.size() != dim) throw DomainError("ContrastSet: contrast dimension mismatch");
        if (!c.allFinite() || c.cwiseAbs().maxCoeff() == 0.0) {
            throw DomainError("ContrastSet: contrasts must be finite and nonzero");
        }
    }
}

/// Z_k = c' xbar / sqrt(c' sigma c / n).
inline double sasabuchi_z(const MvnSample& s, const Vector& c) {
    validate(s);
    if (c.size() != s.dim() || c.cwiseAbs().maxCoeff() == 0.0) {
        throw DomainError("sasabuchi_z: contrast must be nonzero with matching dimension");
    }
    const double variance = c.dot(s.sigma * c) / static_cast<double>(s.n);
    return c.dot(s.xbar) / std::sqrt(variance);
}

/// Intersection-union rule: reject only when every component p-value < alpha.
inline bool iut_decision(std::span<const double> p_values, double alpha) {
    if (p_values.empty()) throw DomainError("iut_decision: no p-values");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("iut_decision: alpha must lie in (0,1)");
    for (double p : p_values) {
        if (!(p < alpha)) return false;
    }
    return true;
}

struct MvnPrior {
    Vector mu0;
    Matrix sigma0;

    static MvnPrior vague(std::int64_t p, double variance = 1000.0) {
        return {Vector::Zero(p), variance * Matrix::Identity(p, p)};
    }
};

struct MvnPosterior {
    Vector mu_n;
    Matrix sigma_n;
};

/// mu_n = S0 (S0 + S/n)^{-1} xbar + (S/n)(S0 + S/n)^{-1} mu0,
/// Sigma_n = S0 (S0 + S/n)^{-1} (S/n) = (S0^{-1} + n S^{-1})^{-1},
/// both through one Cholesky factor of S0 + S/n.
inline MvnPosterior mvn_posterior(const MvnPrior& prior, const MvnSample& s) {
    validate(s);
    if (prior.mu0.size() != s.dim() || !prior.mu0.allFinite()) {
        throw DomainError("mvn_posterior: mu0 dimension mismatch");
    }
    if (prior.sigma0.rows() != s.dim()) throw DomainError("mvn_posterior: sigma0 dimension mismatch");
    detail::require_spd(prior.sigma0, "mvn_posterior.sigma0");
    const Matrix sigma_over_n = s.sigma / static_cast<double>(s.n);
    const Matrix combined = prior.sigma0 + sigma_over_n;
    Eigen::LLT<Matrix> llt(combined);
    if (llt.info() != Eigen::Success) throw DomainError("mvn_posterior: S0 + S/n not positive definite");
    MvnPosterior post;
    post.mu_n = prior.sigma0 * llt.solve(s.xbar) + sigma_over_n * llt.solve(prior.mu0);
    const Matrix sigma_n = prior.sigma0 * llt.solve(sigma_over_n);
    post.sigma_n = 0.5 * (sigma_n + sigma_n.transpose());
    return post;
}

/// c' mu | D ~ N(c' mu_n, c' Sigma_n c).
inline PosteriorTail pop_contrast(const MvnPosterior& post, const Vector& c) {
    if (c.size() != post.mu_n.size()) throw DomainError("pop_contrast: dimension mismatch");
    const double mean = c.dot(post.mu_n);
    const double variance = c.dot(post.sigma_n * c);
    if (!(variance > 0.0)) throw DomainError("pop_contrast: non-positive contrast variance");
    return tail_from_pop_one(std_normal_cdf(-mean / std::sqrt(variance)));
}

/// Per-contrast reports plus the two intersection-union decisions.
struct MvnReport {
    std::vector<TestReport> per_contrast;
    bool reject_one_sided = false;
    bool reject_two_sided = false;
};

inline MvnReport mvn_report(const MvnSample& s, const ContrastSet& set, const MvnPrior& prior,
                            double alpha) {
    validate(s);
    validate(set, s.dim());
    const MvnPosterior post = mvn_posterior(prior, s);
    MvnReport report;
    std::vector<double> p_one;
    std::vector<double> p_two;
    for (const Vector& c : set.contrasts) {
        const double z = sasabuchi_z(s, c);
        const PosteriorTail tail = pop_contrast(post, c);
        report.per_contrast.push_back({z, p_one_sided(z), p_two_sided(z), tail.pop_one, tail.pop_two});
        p_one.push_back(report.per_contrast.back().p_one);
        p_two.push_back(report.per_contrast.back().p_two);
    }
    report.reject_one_sided = iut_decision(p_one, alpha);
    report.reject_two_sided = iut_decision(p_two, alpha);
    return report;
}

}  // namespace popeq
