#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "popeq/error.hpp"
#include "popeq/numeric/special.hpp"

namespace popeq {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing, in (-1, 1)
    std::vector<double> weights;  // positive, summing to 2
    int order = 0;
};

inline constexpr int default_quadrature_order = 64;

/// Builds the order-point Gauss-Legendre rule by Newton iteration on P_order.
inline QuadratureRule gauss_legendre(int order) {
    if (order < 2) throw DomainError("gauss_legendre: order must be at least 2");
    QuadratureRule rule;
    rule.order = order;
    rule.nodes.assign(static_cast<std::size_t>(order), 0.0);
    rule.weights.assign(static_cast<std::size_t>(order), 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi's initial guess for the i-th largest root.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            derivative = order * (z * p1 - p0) / (z * z - 1.0);
            const double step = p1 / derivative;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        derivative = order * (z * p1 - p0) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(order - 1 - i);
        rule.nodes[lo] = -z;
        rule.nodes[hi] = z;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    return rule;
}

/// Integral of f over [lo, hi] with the rule mapped affinely.
template <class F>
double integrate(const QuadratureRule& rule, double lo, double hi, F&& f) {
    const double half_width = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half_width * rule.nodes[i]);
    }
    return sum * half_width;
}

/// Same rule applied on `panels` equal sub-intervals of [lo, hi].
template <class F>
double integrate_composite(const QuadratureRule& rule, double lo, double hi, int panels, F&& f) {
    if (panels < 1) throw DomainError("integrate_composite: panels must be positive");
    const double width = (hi - lo) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = lo + k * width;
        const double b = k + 1 == panels ? hi : a + width;
        sum += integrate(rule, a, b, f);
    }
    return sum;
}

namespace detail {

// log(1 + e^s) without overflow.
inline double softplus(double s) {
    return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

// Log density of s = logit(p) for p ~ Beta(a, b), up to the constant -log B(a, b).
inline double logit_beta_kernel(double a, double b, double s) {
    return a * s - (a + b) * softplus(s);
}

// Point where the log-concave logit-Beta kernel has fallen `drop` below its mode.
inline double logit_beta_cut(double a, double b, double mode, double peak, double drop,
                             double direction) {
    double step = 1.0;
    double inner = mode;
    double outer = mode + direction * step;
    while (peak - logit_beta_kernel(a, b, outer) < drop) {
        inner = outer;
        step *= 2.0;
        outer = mode + direction * step;
    }
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (inner + outer);
        if (peak - logit_beta_kernel(a, b, mid) < drop) {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    return outer;
}

}  // namespace detail

/// Range of s = logit(p), p ~ Beta(a, b), outside which the density is
/// below exp(-drop) times its maximum.
struct LogitSupport {
    double lower;
    double mode;
    double upper;
};

inline LogitSupport logit_beta_support(double a, double b, double drop = 46.0) {
    const double mode = std::log(a / b);
    const double peak = detail::logit_beta_kernel(a, b, mode);
    return {detail::logit_beta_cut(a, b, mode, peak, drop, -1.0), mode,
            detail::logit_beta_cut(a, b, mode, peak, drop, +1.0)};
}

/// E[g(p, 1 - p)] for p ~ Beta(a, b).
///
/// The integral is taken in the logit variable s = log(p / (1 - p)), where the
/// Beta density becomes smooth and log-concave for every a, b > 0 (endpoint
/// singularities of the density disappear). The effective support is split at
/// the mode and each side is covered by `panels_per_side` panels of `rule`,
/// plus graded panels for very long tails.
/// g receives both p and 1 - p so that tail evaluations keep full precision.
template <class G>
double beta_expectation(double a, double b, G&& g, const QuadratureRule& rule,
                        int panels_per_side = 2) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_expectation: a and b must be positive");
    const LogitSupport support = logit_beta_support(a, b);
    const double log_beta_fn =
        detail::log_gamma(a) + detail::log_gamma(b) - detail::log_gamma(a + b);
    // ds-density of s is p^a q^b / B(a, b).
    auto integrand = [&](double s) {
        const double log_p = -detail::softplus(-s);
        const double log_q = -detail::softplus(s);
        const double p = std::exp(log_p);
        const double q = std::exp(log_q);
        const double log_density = std::min(log_p, log_q) > -700.0
                                       ? detail::log_beta_power_terms(a, b, p, q)
                                       : a * log_p + b * log_q - log_beta_fn;
        return std::exp(log_density) * g(p, q);
    };
    // The core next to the mode spans a few curvature widths (at most 16 logit
    // units); longer tails are covered by panels growing by a factor of 4.
    const double core = std::min(32.0 * std::sqrt((a + b) / (a * b)), 16.0);
    auto piece = [&](double from, double to, int panels) {
        const double lo = support.mode + std::min(from, to);
        const double hi = support.mode + std::max(from, to);
        return integrate_composite(rule, lo, hi, panels, integrand);
    };
    auto side = [&](double end) {
        const double length = std::abs(end - support.mode);
        const double dir = end > support.mode ? 1.0 : -1.0;
        const double inner = std::min(length, core);
        double sum = piece(0.0, dir * inner, panels_per_side);
        for (double from = inner; from < length; from *= 4.0) {
            sum += piece(dir * from, dir * std::min(length, 4.0 * from), 1);
        }
        return sum;
    };
    return side(support.lower) + side(support.upper);
}

}  // namespace popeq
