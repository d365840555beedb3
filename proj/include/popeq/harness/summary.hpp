#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "popeq/error.hpp"
#include "popeq/harness/scenario.hpp"

namespace popeq {

/// Agreement between paired (p-value, PoP) values.
struct SummaryStats {
    std::int64_t count = 0;
    double max_abs_diff = 0.0;
    double mean_abs_diff = 0.0;
    double median_abs_diff = 0.0;
    std::optional<double> pearson_r;  // absent when either side has zero variance
};

struct ScenarioSummary {
    SummaryStats one_sided;
    SummaryStats two_sided;
};

/// Statistics of |pop - p| and corr(p, pop). Inputs are sorted before any
/// accumulation, so the result does not depend on record order.
inline SummaryStats summarize_pairs(std::span<const double> p, std::span<const double> pop) {
    if (p.size() != pop.size()) throw DomainError("summarize_pairs: length mismatch");
    SummaryStats s;
    s.count = static_cast<std::int64_t>(p.size());
    if (p.empty()) return s;
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) pairs.emplace_back(p[i], pop[i]);
    std::sort(pairs.begin(), pairs.end());

    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [x, y] : pairs) diffs.push_back(std::abs(y - x));
    std::sort(diffs.begin(), diffs.end());
    long double total = 0.0L;
    for (double d : diffs) total += d;
    const std::size_t m = diffs.size();
    s.max_abs_diff = diffs.back();
    s.mean_abs_diff = static_cast<double>(total / static_cast<long double>(m));
    s.median_abs_diff = m % 2 ? diffs[m / 2] : 0.5 * (diffs[m / 2 - 1] + diffs[m / 2]);

    long double sx = 0.0L;
    long double sy = 0.0L;
    for (const auto& [x, y] : pairs) {
        sx += x;
        sy += y;
    }
    const long double mx = sx / static_cast<long double>(m);
    const long double my = sy / static_cast<long double>(m);
    long double sxx = 0.0L;
    long double syy = 0.0L;
    long double sxy = 0.0L;
    for (const auto& [x, y] : pairs) {
        const long double dx = x - mx;
        const long double dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx > 0.0L && syy > 0.0L) {
        s.pearson_r = std::clamp(static_cast<double>(sxy / std::sqrt(sxx * syy)), -1.0, 1.0);
    }
    return s;
}

inline ScenarioSummary summarize(std::span<const ReplicationRecord> records) {
    std::vector<double> p1, q1, p2, q2;
    for (const ReplicationRecord& r : records) {
        p1.push_back(r.p_one);
        q1.push_back(r.pop_one);
        p2.push_back(r.p_two);
        q2.push_back(r.pop_two);
    }
    return {summarize_pairs(p1, q1), summarize_pairs(p2, q2)};
}

}  // namespace popeq
