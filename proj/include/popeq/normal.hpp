#pragma once

// Paired normal data: the known-variance Z test against a flat prior, and the
// unknown-variance t test against Jeffreys' prior and the conjugate
// normal-inverse-gamma family.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "popeq/error.hpp"
#include "popeq/numeric/special.hpp"
#include "popeq/report.hpp"

namespace popeq {

/// Summary of paired differences x_i = y_Ei - y_Si.
struct PairedNormalData {
    std::int64_t n = 0;
    double theta_hat = 0.0;  // sample mean
    double ssd = 0.0;        // sum of squared deviations from theta_hat
};

/// Two-pass mean and sum of squares; the second pass carries the residual
/// sum for compensation, which keeps ssd stable at n ~ 1e5.
inline PairedNormalData summarize_differences(std::span<const double> x) {
    if (x.empty()) throw DomainError("summarize_differences: empty sample");
    long double sum = 0.0L;
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("summarize_differences: non-finite observation");
        sum += v;
    }
    const auto n = static_cast<long double>(x.size());
    const long double mean = sum / n;
    long double ss = 0.0L;
    long double resid = 0.0L;
    for (double v : x) {
        const long double d = static_cast<long double>(v) - mean;
        ss += d * d;
        resid += d;
    }
    ss -= resid * resid / n;
    return {static_cast<std::int64_t>(x.size()), static_cast<double>(mean + resid / n),
            static_cast<double>(ss < 0 ? 0.0L : ss)};
}

inline void validate(const PairedNormalData& d) {
    if (d.n < 1) throw DomainError("PairedNormalData: n must be positive");
    if (!std::isfinite(d.theta_hat)) throw DomainError("PairedNormalData: theta_hat must be finite");
    if (!(d.ssd >= 0.0) || !std::isfinite(d.ssd)) throw DomainError("PairedNormalData: ssd must be >= 0");
}

// ---------------------------------------------------------------------------
// Known variance (sigma^2 = 1, so Var(theta_hat) = 2 / n)
// ---------------------------------------------------------------------------

inline double z_known_var(double theta_hat, std::int64_t n) {
    detail::require_finite(theta_hat, "z_known_var");
    if (n < 1) throw DomainError("z_known_var: n must be positive");
    return theta_hat * std::sqrt(static_cast<double>(n) / 2.0);
}

/// Flat prior: theta | D ~ N(theta_hat, 2/n).
inline PosteriorTail pop_known_var_flat_prior(double theta_hat, std::int64_t n) {
    const double z = z_known_var(theta_hat, n);
    // Pr(theta <= 0) = Phi(-z),  2 - 2 Phi(|z|) for the two-sided version.
    return {std_normal_cdf(-z), std::min(1.0, 2.0 * std_normal_cdf(-std::abs(z)))};
}

inline TestReport known_variance_report(double theta_hat, std::int64_t n) {
    const double z = z_known_var(theta_hat, n);
    const PosteriorTail tail = pop_known_var_flat_prior(theta_hat, n);
    return {z, p_one_sided(z), p_two_sided(z), tail.pop_one, tail.pop_two};
}

// ---------------------------------------------------------------------------
// Unknown variance
// ---------------------------------------------------------------------------

/// T = theta_hat / sqrt(ssd / ((n - 1) n)).
inline double t_statistic(const PairedNormalData& d) {
    validate(d);
    if (d.n < 2) throw DomainError("t_statistic: need at least two observations");
    if (d.ssd == 0.0) throw DegenerateDataError("t_statistic: zero sample variance");
    const double n = static_cast<double>(d.n);
    return d.theta_hat / std::sqrt(d.ssd / ((n - 1.0) * n));
}

struct TTestResult {
    double statistic;
    double p_one;  // 1 - F_{t_{n-1}}(T)
    double p_two;  // 2 - 2 F_{t_{n-1}}(|T|)
};

inline TTestResult t_test(const PairedNormalData& d) {
    const double t = t_statistic(d);
    const double df = static_cast<double>(d.n - 1);
    return {t, student_t_sf(t, df), std::min(1.0, 2.0 * student_t_sf(std::abs(t), df))};
}

/// N-Inv-chi^2(location, kappa, df, scale2): nu ~ Inv-chi^2(df, scale2),
/// theta | nu ~ N(location, nu / kappa).
struct NormalInvChiSqParams {
    double location = 0.0;
    double kappa = 1.0;
    double df = 1.0;
    double scale2 = 1.0;
};

/// N-IG(theta0, nu0, alpha, beta): nu ~ IG(alpha, beta), theta | nu ~ N(theta0, nu / nu0).
struct NigParams {
    double theta0 = 0.0;
    double nu0 = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
};

inline void validate(const NormalInvChiSqParams& p) {
    if (!std::isfinite(p.location) || !(p.kappa > 0.0) || !(p.df > 0.0) || !(p.scale2 > 0.0)) {
        throw DomainError("NormalInvChiSqParams: kappa, df, scale2 must be positive");
    }
}

inline void validate(const NigParams& p) {
    if (!std::isfinite(p.theta0) || !(p.nu0 > 0.0) || !(p.alpha > 0.0) || !(p.beta > 0.0)) {
        throw DomainError("NigParams: nu0, alpha, beta must be positive");
    }
}

/// Posterior under p(theta, nu) ∝ nu^{-3/2}: N-Inv-chi^2(theta_hat, n, n, ssd / n).
inline NormalInvChiSqParams jeffreys_posterior(const PairedNormalData& d) {
    validate(d);
    if (d.n < 2) throw DomainError("jeffreys_posterior: need at least two observations");
    if (d.ssd == 0.0) throw DegenerateDataError("jeffreys_posterior: zero sample variance");
    const double n = static_cast<double>(d.n);
    return {d.theta_hat, n, n, d.ssd / n};
}

/// Conjugate normal-inverse-gamma update.
inline NigParams nig_posterior(const NigParams& prior, const PairedNormalData& d) {
    validate(prior);
    if (d.n == 0) return prior;
    validate(d);
    const double n = static_cast<double>(d.n);
    const double nu_n = prior.nu0 + n;
    const double dev = d.theta_hat - prior.theta0;
    return {(prior.theta0 * prior.nu0 + n * d.theta_hat) / nu_n, nu_n, prior.alpha + n / 2.0,
            prior.beta + d.ssd / 2.0 + (n * prior.nu0 / nu_n) * dev * dev / 2.0};
}

/// Location-scale Student t: theta = location + scale * T_df.
struct LocationScaleT {
    double location;
    double scale;
    double df;
};

inline LocationScaleT marginal_theta(const NormalInvChiSqParams& p) {
    validate(p);
    return {p.location, std::sqrt(p.scale2 / p.kappa), p.df};
}

inline LocationScaleT marginal_theta(const NigParams& p) {
    validate(p);
    return {p.theta0, std::sqrt(p.beta / (p.alpha * p.nu0)), 2.0 * p.alpha};
}

/// Pr(theta <= 0 | D) from the marginal t of theta.
inline double pop_theta_leq_zero(const LocationScaleT& m) {
    if (!(m.scale > 0.0) || !(m.df > 0.0)) throw DomainError("pop_theta_leq_zero: invalid marginal");
    return student_t_cdf(-m.location / m.scale, m.df);
}

inline double pop_theta_leq_zero(const NormalInvChiSqParams& p) {
    return pop_theta_leq_zero(marginal_theta(p));
}

inline double pop_theta_leq_zero(const NigParams& p) { return pop_theta_leq_zero(marginal_theta(p)); }

template <class Posterior>
PosteriorTail theta_tail(const Posterior& p) {
    return tail_from_pop_one(pop_theta_leq_zero(p));
}

/// Joint log density of (theta, nu) under N-Inv-chi^2.
inline double log_density(const NormalInvChiSqParams& p, double theta, double nu) {
    validate(p);
    if (!(nu > 0.0)) return -INFINITY;
    const double h = 0.5 * p.df;
    const double log_inv_chi2 = h * std::log(h * p.scale2) - detail::log_gamma(h) -
                                (h + 1.0) * std::log(nu) - h * p.scale2 / nu;
    const double dev = theta - p.location;
    const double log_normal =
        -0.5 * std::log(2.0 * std::numbers::pi * nu / p.kappa) - 0.5 * p.kappa * dev * dev / nu;
    return log_inv_chi2 + log_normal;
}

enum class NormalPrior { jeffreys, nig };

inline constexpr NigParams vague_nig_prior{0.0, 100.0, 0.01, 0.01};

/// t test beside the posterior of theta under either prior.
inline TestReport unknown_variance_report(const PairedNormalData& d, NormalPrior prior_kind,
                                          const NigParams& nig_prior = vague_nig_prior) {
    const TTestResult t = t_test(d);
    const PosteriorTail tail = prior_kind == NormalPrior::jeffreys
                                   ? theta_tail(jeffreys_posterior(d))
                                   : theta_tail(nig_posterior(nig_prior, d));
    return {t.statistic, t.p_one, t.p_two, tail.pop_one, tail.pop_two};
}

}  // namespace popeq
