#pragma once

// Exact operating characteristics of two-arm binomial designs: every outcome
// pair (y_E, y_S) in {0..n}^2 is enumerated, weighted by its binomial
// probability, and tested against either the Z rule (Z > z_alpha) or the
// posterior rule (Pr(p_E > p_S | y) > eta).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "popeq/binary.hpp"
#include "popeq/error.hpp"
#include "popeq/numeric/special.hpp"
#include "popeq/parallel.hpp"

namespace popeq {

struct DesignSpec {
    double alpha = 0.10;
    double target_power = 0.80;
    double p_s = 0.2;
    double p_e_alt = 0.3;
    std::optional<std::int64_t> n;  // per arm; sample_size() when absent
    TwoArmPriors priors{};
    std::optional<double> eta;  // posterior threshold; 1 - alpha when absent

    double delta() const { return p_e_alt - p_s; }
};

inline void validate(const DesignSpec& d) {
    if (!(d.alpha > 0.0 && d.alpha < 1.0)) throw DomainError("DesignSpec: alpha must lie in (0,1)");
    if (!(d.target_power > 0.0 && d.target_power < 1.0)) {
        throw DomainError("DesignSpec: target power must lie in (0,1)");
    }
    if (!(d.p_s > 0.0 && d.p_s < d.p_e_alt && d.p_e_alt < 1.0)) {
        throw DomainError("DesignSpec: require 0 < p_S < p_E < 1");
    }
    if (d.n && *d.n < 1) throw DomainError("DesignSpec: n must be at least 1");
    if (d.eta && !(*d.eta > 0.0 && *d.eta < 1.0)) throw DomainError("DesignSpec: eta must lie in (0,1)");
    validate(d.priors.experimental);
    validate(d.priors.standard);
}

struct ErrorRates {
    double type1 = 0.0;
    double type2 = 0.0;
    double power = 0.0;
};

enum class DecisionRule { frequentist, bayesian };

inline std::string to_string(DecisionRule r) {
    return r == DecisionRule::frequentist ? "frequentist" : "bayesian";
}

/// Per-arm n = (z_alpha + z_beta)^2 / delta^2 * {pE(1-pE) + pS(1-pS)}, rounded up.
inline double sample_size_unrounded(double alpha, double target_power, double p_s, double p_e) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("sample_size: alpha must lie in (0,1)");
    if (!(target_power > 0.0 && target_power < 1.0)) {
        throw DomainError("sample_size: power must lie in (0,1)");
    }
    if (!(p_s > 0.0 && p_s < 1.0 && p_e > 0.0 && p_e < 1.0) || p_s == p_e) {
        throw DomainError("sample_size: response rates must lie in (0,1) and differ");
    }
    const double z_alpha = std_normal_quantile(1.0 - alpha);
    const double z_beta = std_normal_quantile(target_power);
    const double delta = p_e - p_s;
    return (z_alpha + z_beta) * (z_alpha + z_beta) / (delta * delta) *
           (p_e * (1.0 - p_e) + p_s * (1.0 - p_s));
}

inline std::int64_t sample_size(double alpha, double target_power, double p_s, double p_e) {
    // Absorb rounding noise so exact integers are not bumped up.
    const double raw = sample_size_unrounded(alpha, target_power, p_s, p_e);
    return static_cast<std::int64_t>(std::ceil(raw * (1.0 - 1e-12)));
}

inline std::int64_t resolved_n(const DesignSpec& d) {
    return d.n ? *d.n : sample_size(d.alpha, d.target_power, d.p_s, d.p_e_alt);
}

/// Cache of Pr(p_E > p_S | y_E, y_S) for every outcome pair.
class SuperiorityTable {
public:
    SuperiorityTable(std::int64_t n, const TwoArmPriors& priors,
                     const BetaQuadrature& quad = default_beta_quadrature(), unsigned threads = 1)
        : n_(n), values_(static_cast<std::size_t>((n + 1) * (n + 1))) {
        if (n < 1) throw DomainError("SuperiorityTable: n must be at least 1");
        validate(priors.experimental);
        validate(priors.standard);
        std::vector<BetaParams> post_s;
        for (std::int64_t ys = 0; ys <= n; ++ys) post_s.push_back(beta_posterior(priors.standard, ys, n));
        parallel_for(static_cast<std::size_t>(n + 1), threads, [&](std::size_t row) {
            const auto ye = static_cast<std::int64_t>(row);
            const BetaParams post_e = beta_posterior(priors.experimental, ye, n);
            for (std::int64_t ys = 0; ys <= n; ++ys) {
                values_[index(ye, ys)] = prob_pE_greater_pS(post_e, post_s[static_cast<std::size_t>(ys)], quad);
            }
        });
    }

    std::int64_t n() const { return n_; }
    double at(std::int64_t ye, std::int64_t ys) const { return values_[index(ye, ys)]; }

private:
    std::size_t index(std::int64_t ye, std::int64_t ys) const {
        return static_cast<std::size_t>(ye * (n_ + 1) + ys);
    }
    std::int64_t n_;
    std::vector<double> values_;
};

/// Indicator of rejection for each (y_E, y_S).
class RejectionRegion {
public:
    static RejectionRegion frequentist(std::int64_t n, double alpha) {
        RejectionRegion r(n);
        const double z_crit = std_normal_quantile(1.0 - alpha);
        for (std::int64_t ye = 0; ye <= n; ++ye) {
            for (std::int64_t ys = 0; ys <= n; ++ys) {
                const ZStatistic z = two_sample_z({n, ye, ys});
                r.cells_[r.index(ye, ys)] = !z.degenerate && z.value > z_crit;
            }
        }
        return r;
    }

    static RejectionRegion bayesian(const SuperiorityTable& table, double eta) {
        RejectionRegion r(table.n());
        for (std::int64_t ye = 0; ye <= table.n(); ++ye) {
            for (std::int64_t ys = 0; ys <= table.n(); ++ys) {
                r.cells_[r.index(ye, ys)] = table.at(ye, ys) > eta;
            }
        }
        return r;
    }

    std::int64_t n() const { return n_; }
    bool rejects(std::int64_t ye, std::int64_t ys) const { return cells_[index(ye, ys)] != 0; }

    /// Number of outcome pairs where the two regions disagree.
    std::int64_t disagreements(const RejectionRegion& other) const {
        if (other.n_ != n_) throw DomainError("RejectionRegion: size mismatch");
        std::int64_t count = 0;
        for (std::size_t i = 0; i < cells_.size(); ++i) count += cells_[i] != other.cells_[i];
        return count;
    }

private:
    explicit RejectionRegion(std::int64_t n)
        : n_(n), cells_(static_cast<std::size_t>((n + 1) * (n + 1)), 0) {}
    std::size_t index(std::int64_t ye, std::int64_t ys) const {
        return static_cast<std::size_t>(ye * (n_ + 1) + ys);
    }
    std::int64_t n_;
    std::vector<unsigned char> cells_;
};

inline std::vector<double> binomial_weights(std::int64_t n, double p) {
    std::vector<double> w(static_cast<std::size_t>(n + 1));
    for (std::int64_t y = 0; y <= n; ++y) w[static_cast<std::size_t>(y)] = binomial_pmf(y, n, p);
    return w;
}

/// Sum over (y_E, y_S) of P(y_E | p_e) P(y_S | p_s) for the cells selected
/// by `keep`, in a fixed row-major order.
template <class Keep>
double enumerate_mass(std::int64_t n, double p_e, double p_s, Keep&& keep) {
    const std::vector<double> we = binomial_weights(n, p_e);
    const std::vector<double> ws = binomial_weights(n, p_s);
    long double total = 0.0L;
    for (std::int64_t ye = 0; ye <= n; ++ye) {
        long double row = 0.0L;
        for (std::int64_t ys = 0; ys <= n; ++ys) {
            if (keep(ye, ys)) row += ws[static_cast<std::size_t>(ys)];
        }
        total += row * we[static_cast<std::size_t>(ye)];
    }
    return static_cast<double>(total);
}

inline double rejection_probability(const RejectionRegion& region, double p_e, double p_s) {
    return enumerate_mass(region.n(), p_e, p_s,
                          [&](std::int64_t ye, std::int64_t ys) { return region.rejects(ye, ys); });
}

inline double joint_mass_total(std::int64_t n, double p_e, double p_s) {
    return enumerate_mass(n, p_e, p_s, [](std::int64_t, std::int64_t) { return true; });
}

struct PowerPoint {
    double p_e;
    double power;
};

struct EtaCalibration {
    double eta;
    double achieved_type1;
    double grid_step;
};

/// Default power-curve grid p_S, p_S + 0.01, ..., p_S + 2 delta (kept below 1).
inline std::vector<double> default_power_grid(const DesignSpec& d, double step = 0.01) {
    std::vector<double> grid;
    const auto steps = static_cast<std::int64_t>(std::floor(2.0 * d.delta() / step + 1e-9));
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double p = d.p_s + static_cast<double>(k) * step;
        if (p >= 1.0) break;
        grid.push_back(p);
    }
    return grid;
}

/// Evaluates one design under both rules, computing the posterior table once.
class DesignEvaluator {
public:
    explicit DesignEvaluator(DesignSpec design, BetaQuadrature quad = default_beta_quadrature(),
                             unsigned threads = 1)
        : design_(std::move(design)), quad_(std::move(quad)), threads_(threads) {
        validate(design_);
        n_ = resolved_n(design_);
    }

    const DesignSpec& design() const { return design_; }
    std::int64_t n() const { return n_; }
    double eta() const { return design_.eta ? *design_.eta : 1.0 - design_.alpha; }

    const SuperiorityTable& table() {
        if (!table_) table_.emplace(n_, design_.priors, quad_, threads_);
        return *table_;
    }

    RejectionRegion region(DecisionRule rule) { return region(rule, eta()); }

    RejectionRegion region(DecisionRule rule, double eta) {
        if (rule == DecisionRule::frequentist) return RejectionRegion::frequentist(n_, design_.alpha);
        return RejectionRegion::bayesian(table(), eta);
    }

    /// Exact type I error (p_E = p_S) and type II error / power at p_E = p_S + delta.
    ErrorRates error_rates(DecisionRule rule) {
        const RejectionRegion r = region(rule);
        ErrorRates rates;
        rates.type1 = rejection_probability(r, design_.p_s, design_.p_s);
        rates.type2 = enumerate_mass(n_, design_.p_e_alt, design_.p_s,
                                     [&](std::int64_t ye, std::int64_t ys) { return !r.rejects(ye, ys); });
        rates.power = 1.0 - rates.type2;
        return rates;
    }

    std::vector<PowerPoint> power_curve(DecisionRule rule, const std::vector<double>& grid) {
        const RejectionRegion r = region(rule);
        std::vector<PowerPoint> curve;
        for (double p_e : grid) {
            if (!(p_e >= 0.0 && p_e <= 1.0)) throw DomainError("power_curve: grid values must lie in [0,1]");
            curve.push_back({p_e, rejection_probability(r, p_e, design_.p_s)});
        }
        return curve;
    }

    /// Smallest eta on the grid {step, 2 step, ...} whose exact Bayesian type I
    /// error does not exceed `target`. Type I error is nonincreasing in eta,
    /// so this is the least conservative admissible threshold.
    EtaCalibration calibrate_eta(double target, double step = 1e-4) {
        if (!(target > 0.0 && target < 1.0)) throw DomainError("calibrate_eta: target must lie in (0,1)");
        if (!(step > 0.0 && step < 0.5)) throw DomainError("calibrate_eta: step must lie in (0, 0.5)");
        const SuperiorityTable& t = table();
        // Null mass of each cell, sorted by posterior probability descending.
        const std::vector<double> w = binomial_weights(n_, design_.p_s);
        std::vector<std::pair<double, double>> cells;
        cells.reserve(static_cast<std::size_t>((n_ + 1) * (n_ + 1)));
        for (std::int64_t ye = 0; ye <= n_; ++ye) {
            for (std::int64_t ys = 0; ys <= n_; ++ys) {
                cells.emplace_back(t.at(ye, ys), w[static_cast<std::size_t>(ye)] * w[static_cast<std::size_t>(ys)]);
            }
        }
        std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        std::vector<long double> prefix(cells.size() + 1, 0.0L);
        for (std::size_t i = 0; i < cells.size(); ++i) prefix[i + 1] = prefix[i] + cells[i].second;
        auto type1_at = [&](double eta) {
            const auto it = std::partition_point(cells.begin(), cells.end(),
                                                 [&](const auto& c) { return c.first > eta; });
            return static_cast<double>(prefix[static_cast<std::size_t>(it - cells.begin())]);
        };
        const auto last = static_cast<std::int64_t>(std::floor((1.0 - step) / step + 1e-9));
        auto eta_of = [&](std::int64_t k) { return static_cast<double>(k) * step; };
        if (type1_at(eta_of(last)) > target) {
            throw DomainError("calibrate_eta: no grid threshold attains the target type I error");
        }
        std::int64_t lo = 1;
        std::int64_t hi = last;
        while (lo < hi) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (type1_at(eta_of(mid)) <= target) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return {eta_of(lo), type1_at(eta_of(lo)), step};
    }

private:
    DesignSpec design_;
    BetaQuadrature quad_;
    unsigned threads_;
    std::int64_t n_ = 0;
    std::optional<SuperiorityTable> table_;
};

inline ErrorRates exact_error_rates(const DesignSpec& design, DecisionRule rule,
                                    const BetaQuadrature& quad = default_beta_quadrature(),
                                    unsigned threads = 1) {
    DesignEvaluator evaluator(design, quad, threads);
    return evaluator.error_rates(rule);
}

inline std::vector<PowerPoint> power_curve(const DesignSpec& design, DecisionRule rule,
                                           const std::vector<double>& grid,
                                           const BetaQuadrature& quad = default_beta_quadrature(),
                                           unsigned threads = 1) {
    DesignEvaluator evaluator(design, quad, threads);
    return evaluator.power_curve(rule, grid);
}

/// CSV with columns p_E, rule, type1_or_power.
inline void write_power_curve_csv(std::ostream& out,
                                  const std::vector<std::pair<DecisionRule, std::vector<PowerPoint>>>& curves) {
    out << "p_E,rule,type1_or_power\n";
    char buf[64];
    for (const auto& [rule, curve] : curves) {
        for (const PowerPoint& pt : curve) {
            std::snprintf(buf, sizeof buf, "%.17g", pt.p_e);
            out << buf << ',' << to_string(rule) << ',';
            std::snprintf(buf, sizeof buf, "%.17g", pt.power);
            out << buf << '\n';
        }
    }
}

}  // namespace popeq
