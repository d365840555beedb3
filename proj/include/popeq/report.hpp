#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "popeq/error.hpp"
#include "popeq/numeric/special.hpp"

namespace popeq {

/// One-sided and two-sided posterior probabilities of the null.
struct PosteriorTail {
    double pop_one = 0.5;  // Pr(null half-space | data)
    double pop_two = 1.0;  // 2 min{Pr(> 0 | data), Pr(< 0 | data)}
};

/// Frequentist and Bayesian summaries of a single dataset, side by side.
struct TestReport {
    std::optional<double> statistic;  // Z or T; absent for exact tests
    double p_one = 0.5;
    double p_two = 1.0;
    double pop_one = 0.5;
    double pop_two = 1.0;
};

/// 2 min(q, 1 - q), the two-sided counterpart of a one-sided tail q.
inline double two_sided_from_one(double q) {
    return std::clamp(2.0 * std::min(q, 1.0 - q), 0.0, 1.0);
}

inline PosteriorTail tail_from_pop_one(double pop_one) {
    return {pop_one, two_sided_from_one(pop_one)};
}

/// p-value 1 - Phi(z). Infinite z is accepted (perfect separation).
inline double p_one_sided(double z) {
    if (std::isnan(z)) throw DomainError("p_one_sided: NaN statistic");
    if (std::isinf(z)) return z > 0 ? 0.0 : 1.0;
    return std_normal_sf(z);
}

/// p-value 2 - 2 Phi(|z|).
inline double p_two_sided(double z) {
    if (std::isnan(z)) throw DomainError("p_two_sided: NaN statistic");
    if (std::isinf(z)) return 0.0;
    return std::min(1.0, 2.0 * std_normal_sf(std::abs(z)));
}

}  // namespace popeq
