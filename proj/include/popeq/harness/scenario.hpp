#pragma once

// Seeded simulation scenarios pairing p-values with posterior probabilities
// of the null for each test family.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "popeq/binary.hpp"
#include "popeq/error.hpp"
#include "popeq/multivariate.hpp"
#include "popeq/normal.hpp"
#include "popeq/numeric/random.hpp"
#include "popeq/parallel.hpp"
#include "popeq/version.hpp"

namespace popeq {

enum class Family {
    binary_two_sample,
    binary_one_sample,
    normal_jeffreys,
    normal_nig_vague,
    normal_nig_informative,
    normal_nonnormal,
    mvn,
};

enum class NonNormalShape { gamma, beta, mixture };

enum class GammaConvention { shape_scale, shape_rate };

inline const std::vector<std::pair<std::string, Family>>& family_names() {
    static const std::vector<std::pair<std::string, Family>> names = {
        {"binary-two-sample", Family::binary_two_sample},
        {"binary-one-sample", Family::binary_one_sample},
        {"normal-jeffreys", Family::normal_jeffreys},
        {"normal-nig-vague", Family::normal_nig_vague},
        {"normal-nig-informative", Family::normal_nig_informative},
        {"normal-nonnormal", Family::normal_nonnormal},
        {"mvn", Family::mvn},
    };
    return names;
}

inline std::string to_string(Family f) {
    for (const auto& [name, value] : family_names()) {
        if (value == f) return name;
    }
    return "unknown";
}

inline Family parse_family(const std::string& s) {
    for (const auto& [name, value] : family_names()) {
        if (name == s) return value;
    }
    throw ConfigError("unknown scenario family '" + s + "'");
}

inline std::string to_string(NonNormalShape s) {
    switch (s) {
        case NonNormalShape::gamma: return "gamma";
        case NonNormalShape::beta: return "beta";
        case NonNormalShape::mixture: return "mixture";
    }
    return "unknown";
}

inline NonNormalShape parse_nonnormal_shape(const std::string& s) {
    if (s == "gamma") return NonNormalShape::gamma;
    if (s == "beta") return NonNormalShape::beta;
    if (s == "mixture") return NonNormalShape::mixture;
    throw ConfigError("unknown non-normal shape '" + s + "'");
}

inline std::string to_string(GammaConvention c) {
    return c == GammaConvention::shape_scale ? "shape-scale" : "shape-rate";
}

inline GammaConvention parse_gamma_convention(const std::string& s) {
    if (s == "shape-scale") return GammaConvention::shape_scale;
    if (s == "shape-rate") return GammaConvention::shape_rate;
    throw ConfigError("unknown gamma convention '" + s + "'");
}

/// Every knob of a simulation run. Defaults reproduce the standard protocols;
/// normal-distribution parameters are given as (mean, variance).
struct ScenarioSpec {
    Family family = Family::binary_two_sample;
    std::int64_t n = 20;
    std::int64_t reps = 1000;
    RngSeed seed{42};

    // Binary families.
    TwoArmPriors two_arm_priors{};
    BetaParams one_arm_prior = default_one_sample_prior;
    double p0 = 0.2;
    TwoSidedBinomialMethod two_sided_method = TwoSidedBinomialMethod::doubled_tail;
    int quadrature_order = default_quadrature_order;
    int quadrature_panels = 1;

    // Normal families: theta ~ N(theta_mean, theta_var), nu ~ N(nu_mean, nu_var) | nu > 0.
    double theta_mean = 0.0;
    double theta_var = 0.05;
    double nu_mean = 1.0;
    double nu_var = 0.05;
    NigParams vague_prior = vague_nig_prior;
    // Informative prior: theta0 = theta + offset.
    double informative_offset = 0.01;
    double informative_nu0 = 0.01;
    double informative_alpha = 0.01;
    double informative_beta = 0.01;

    // Non-normal data: x_i = draw - (mean + U), U ~ Uniform(recenter_lo, recenter_hi) per replication.
    NonNormalShape nonnormal_shape = NonNormalShape::gamma;
    double gamma_shape = 2.0;
    double gamma_param = 0.5;
    GammaConvention gamma_convention = GammaConvention::shape_scale;
    double beta_a = 0.5;
    double beta_b = 0.5;
    double mixture_offset = 1.0;  // equal-weight N(-offset, 1), N(+offset, 1)
    double recenter_lo = 0.0;
    double recenter_hi = 1.0;

    // Multivariate: X_i ~ N_p(mu, sigma), mu_j ~ N(0, mu_var); unit contrasts e_1..e_K.
    std::int64_t dim = 2;
    std::int64_t contrasts = 2;
    double mvn_correlation = 0.3;  // sigma = unit variances with this off-diagonal
    double mu_var = 0.05;
    double prior_variance = 1000.0;
};

inline Matrix scenario_sigma(const ScenarioSpec& s) {
    Matrix sigma = Matrix::Constant(s.dim, s.dim, s.mvn_correlation);
    sigma.diagonal().setOnes();
    return sigma;
}

inline double gamma_scale(const ScenarioSpec& s) {
    return s.gamma_convention == GammaConvention::shape_scale ? s.gamma_param : 1.0 / s.gamma_param;
}

inline double nonnormal_mean(const ScenarioSpec& s) {
    switch (s.nonnormal_shape) {
        case NonNormalShape::gamma: return s.gamma_shape * gamma_scale(s);
        case NonNormalShape::beta: return s.beta_a / (s.beta_a + s.beta_b);
        case NonNormalShape::mixture: return 0.0;
    }
    return 0.0;
}

inline bool is_normal_family(Family f) {
    return f == Family::normal_jeffreys || f == Family::normal_nig_vague ||
           f == Family::normal_nig_informative || f == Family::normal_nonnormal;
}

inline void validate(const ScenarioSpec& s) {
    if (s.reps < 1) throw ConfigError("scenario: reps must be at least 1");
    if (s.n < 1) throw ConfigError("scenario: n must be at least 1");
    if (is_normal_family(s.family) && s.n < 2) throw ConfigError("scenario: normal families need n >= 2");
    if (s.quadrature_order < 2) throw ConfigError("scenario: quadrature order must be at least 2");
    if (s.quadrature_panels < 1) throw ConfigError("scenario: quadrature panels must be positive");
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("scenario: ") + what + " must be positive");
    };
    switch (s.family) {
        case Family::binary_two_sample:
            validate(s.two_arm_priors.experimental);
            validate(s.two_arm_priors.standard);
            break;
        case Family::binary_one_sample:
            validate(s.one_arm_prior);
            if (!(s.p0 > 0.0 && s.p0 < 1.0)) throw ConfigError("scenario: p0 must lie in (0,1)");
            break;
        case Family::normal_nonnormal:
            positive(s.gamma_shape, "gamma shape");
            positive(s.gamma_param, "gamma parameter");
            positive(s.beta_a, "beta a");
            positive(s.beta_b, "beta b");
            if (!(s.recenter_lo < s.recenter_hi)) throw ConfigError("scenario: recenter range is empty");
            [[fallthrough]];
        case Family::normal_jeffreys:
        case Family::normal_nig_vague:
        case Family::normal_nig_informative:
            positive(s.theta_var, "theta variance");
            positive(s.nu_var, "nu variance");
            validate(s.vague_prior);
            positive(s.informative_nu0, "informative nu0");
            positive(s.informative_alpha, "informative alpha");
            positive(s.informative_beta, "informative beta");
            break;
        case Family::mvn:
            if (s.dim < 1) throw ConfigError("scenario: dim must be positive");
            if (s.contrasts < 1 || s.contrasts > s.dim) throw ConfigError("scenario: need 1 <= contrasts <= dim");
            positive(s.mu_var, "mu variance");
            positive(s.prior_variance, "prior variance");
            if (Eigen::LLT<Matrix>(scenario_sigma(s)).info() != Eigen::Success) {
                throw ConfigError("scenario: correlation does not give a positive-definite sigma");
            }
            break;
    }
}

/// One replication: the four probabilities plus family-specific raw fields.
struct ReplicationRecord {
    std::int64_t rep_index = 0;
    double p_one = 0.0;
    double p_two = 0.0;
    double pop_one = 0.0;
    double pop_two = 0.0;
    std::vector<double> fields;
};

inline std::vector<std::string> record_field_names(Family f) {
    switch (f) {
        case Family::binary_two_sample: return {"y_e", "y_s", "z", "degenerate"};
        case Family::binary_one_sample: return {"y_e"};
        case Family::normal_jeffreys:
        case Family::normal_nig_vague:
        case Family::normal_nig_informative: return {"theta", "theta_hat", "ssd", "t"};
        case Family::normal_nonnormal: return {"shift", "theta_hat", "ssd", "t"};
        case Family::mvn: return {"contrast", "z"};
    }
    return {};
}

namespace detail {

inline std::string describe(const ReplicationRecord& r) {
    std::ostringstream os;
    os.precision(17);
    os << "rep " << r.rep_index << ": p_one=" << r.p_one << " p_two=" << r.p_two
       << " pop_one=" << r.pop_one << " pop_two=" << r.pop_two << " raw=[";
    for (std::size_t i = 0; i < r.fields.size(); ++i) os << (i ? "," : "") << r.fields[i];
    os << "]";
    return os.str();
}

inline void check_record(const ReplicationRecord& r) {
    for (double v : {r.p_one, r.p_two, r.pop_one, r.pop_two}) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvariantViolation("probability outside [0,1] at " + describe(r));
    }
}

inline std::vector<double> draw_normal_family_sample(const ScenarioSpec& s, Sampler& rng,
                                                     double& theta, double& shift) {
    std::vector<double> x(static_cast<std::size_t>(s.n));
    theta = 0.0;
    shift = 0.0;
    if (s.family == Family::normal_nonnormal) {
        shift = nonnormal_mean(s) + rng.uniform(s.recenter_lo, s.recenter_hi);
        const double scale = gamma_scale(s);
        for (double& v : x) {
            double draw = 0.0;
            switch (s.nonnormal_shape) {
                case NonNormalShape::gamma: draw = rng.gamma(s.gamma_shape, scale); break;
                case NonNormalShape::beta: draw = rng.beta(s.beta_a, s.beta_b); break;
                case NonNormalShape::mixture:
                    draw = rng.normal(rng.uniform() < 0.5 ? -s.mixture_offset : s.mixture_offset, 1.0);
                    break;
            }
            v = draw - shift;
        }
        return x;
    }
    theta = rng.normal(s.theta_mean, std::sqrt(s.theta_var));
    const double nu = rng.truncated_normal(s.nu_mean, std::sqrt(s.nu_var), 0.0);
    const double sd = std::sqrt(nu);
    for (double& v : x) v = theta + sd * rng.normal();
    return x;
}

inline std::vector<ReplicationRecord> run_replication(const ScenarioSpec& s, const BetaQuadrature& quad,
                                                      std::int64_t rep) {
    Sampler rng(derive_stream(s.seed, static_cast<std::uint64_t>(rep)));
    std::vector<ReplicationRecord> out;
    switch (s.family) {
        case Family::binary_two_sample: {
            const TwoArmBinomialData d{s.n, rng.uniform_int(s.n), rng.uniform_int(s.n)};
            const ZStatistic z = two_sample_z(d);
            const TestReport r = two_sample_report(d, s.two_arm_priors, quad);
            out.push_back({rep, r.p_one, r.p_two, r.pop_one, r.pop_two,
                           {static_cast<double>(d.y_e), static_cast<double>(d.y_s), z.value,
                            z.degenerate ? 1.0 : 0.0}});
            break;
        }
        case Family::binary_one_sample: {
            const OneArmBinomialData d{s.n, rng.uniform_int(s.n), s.p0};
            const TestReport r = one_sample_report(d, s.one_arm_prior, s.two_sided_method);
            out.push_back({rep, r.p_one, r.p_two, r.pop_one, r.pop_two, {static_cast<double>(d.y_e)}});
            break;
        }
        case Family::normal_jeffreys:
        case Family::normal_nig_vague:
        case Family::normal_nig_informative:
        case Family::normal_nonnormal: {
            double theta = 0.0;
            double shift = 0.0;
            const std::vector<double> x = draw_normal_family_sample(s, rng, theta, shift);
            const PairedNormalData d = summarize_differences(x);
            const TTestResult t = t_test(d);
            PosteriorTail tail;
            if (s.family == Family::normal_nig_vague) {
                tail = theta_tail(nig_posterior(s.vague_prior, d));
            } else if (s.family == Family::normal_nig_informative) {
                const NigParams prior{theta + s.informative_offset, s.informative_nu0,
                                      s.informative_alpha, s.informative_beta};
                tail = theta_tail(nig_posterior(prior, d));
            } else {
                tail = theta_tail(jeffreys_posterior(d));
            }
            const double first = s.family == Family::normal_nonnormal ? shift : theta;
            out.push_back({rep, t.p_one, t.p_two, tail.pop_one, tail.pop_two,
                           {first, d.theta_hat, d.ssd, t.statistic}});
            break;
        }
        case Family::mvn: {
            const Matrix sigma = scenario_sigma(s);
            const Eigen::LLT<Matrix> chol(sigma);
            const Matrix lower = chol.matrixL();
            Vector mu(s.dim);
            for (Eigen::Index j = 0; j < mu.size(); ++j) mu[j] = rng.normal(0.0, std::sqrt(s.mu_var));
            Vector sum = Vector::Zero(s.dim);
            Vector z(s.dim);
            for (std::int64_t i = 0; i < s.n; ++i) {
                for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
                sum += mu + lower * z;
            }
            const MvnSample sample{s.n, sum / static_cast<double>(s.n), sigma};
            const ContrastSet set = ContrastSet::unit_vectors(s.dim, s.contrasts);
            const MvnReport report = mvn_report(sample, set, MvnPrior::vague(s.dim, s.prior_variance), 0.05);
            for (std::size_t k = 0; k < report.per_contrast.size(); ++k) {
                const TestReport& r = report.per_contrast[k];
                out.push_back({rep, r.p_one, r.p_two, r.pop_one, r.pop_two,
                               {static_cast<double>(k + 1), *r.statistic}});
            }
            break;
        }
    }
    for (const ReplicationRecord& r : out) check_record(r);
    return out;
}

}  // namespace detail

/// Runs all replications. Replication r draws from stream r of the master
/// seed, so the result is identical for any thread count.
inline std::vector<ReplicationRecord> run_scenario(const ScenarioSpec& spec, unsigned threads = 1) {
    validate(spec);
    const BetaQuadrature quad{gauss_legendre(spec.quadrature_order), spec.quadrature_panels};
    std::vector<std::vector<ReplicationRecord>> per_rep(static_cast<std::size_t>(spec.reps));
    parallel_for(per_rep.size(), threads, [&](std::size_t r) {
        per_rep[r] = detail::run_replication(spec, quad, static_cast<std::int64_t>(r));
    });
    std::vector<ReplicationRecord> records;
    for (auto& batch : per_rep) {
        for (auto& rec : batch) records.push_back(std::move(rec));
    }
    return records;
}

/// Resolved configuration and conventions, enough to regenerate a run.
inline std::vector<std::pair<std::string, std::string>> scenario_metadata(const ScenarioSpec& s) {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::vector<std::pair<std::string, std::string>> meta = {
        {"version", std::string(version)},
        {"family", to_string(s.family)},
        {"n", std::to_string(s.n)},
        {"reps", std::to_string(s.reps)},
        {"seed", std::to_string(s.seed.seed)},
        {"rng", "mt19937_64; stream r seeded by splitmix64(seed + (r+1)*0x9E3779B97F4A7C15)"},
    };
    switch (s.family) {
        case Family::binary_two_sample:
            meta.insert(meta.end(), {
                {"prior_e", num(s.two_arm_priors.experimental.a) + "," + num(s.two_arm_priors.experimental.b)},
                {"prior_s", num(s.two_arm_priors.standard.a) + "," + num(s.two_arm_priors.standard.b)},
                {"quadrature", "gauss-legendre order " + std::to_string(s.quadrature_order) + " x " +
                                   std::to_string(s.quadrature_panels) + " panel(s) per side, logit scale"},
                {"degenerate_z", "both proportions on the same boundary -> Z = 0"},
            });
            break;
        case Family::binary_one_sample:
            meta.insert(meta.end(), {
                {"prior", num(s.one_arm_prior.a) + "," + num(s.one_arm_prior.b)},
                {"p0", num(s.p0)},
                {"two_sided_binomial", to_string(s.two_sided_method)},
            });
            break;
        case Family::normal_nonnormal:
            meta.insert(meta.end(), {
                {"shape", to_string(s.nonnormal_shape)},
                {"gamma", num(s.gamma_shape) + "," + num(s.gamma_param) + " (" + to_string(s.gamma_convention) + ")"},
                {"beta", num(s.beta_a) + "," + num(s.beta_b)},
                {"mixture", "equal-weight N(-" + num(s.mixture_offset) + ",1), N(" + num(s.mixture_offset) + ",1)"},
                {"recentering", "x - (mean + U), U ~ Uniform(" + num(s.recenter_lo) + "," + num(s.recenter_hi) +
                                    ") drawn once per replication"},
                {"prior", "jeffreys p(theta,nu) ~ nu^(-3/2)"},
            });
            break;
        case Family::normal_jeffreys:
        case Family::normal_nig_vague:
        case Family::normal_nig_informative:
            meta.insert(meta.end(), {
                {"theta", "N(" + num(s.theta_mean) + ", var " + num(s.theta_var) + ")"},
                {"nu", "N(" + num(s.nu_mean) + ", var " + num(s.nu_var) + ") truncated at 0"},
            });
            if (s.family == Family::normal_jeffreys) meta.push_back({"prior", "jeffreys p(theta,nu) ~ nu^(-3/2)"});
            if (s.family == Family::normal_nig_vague) {
                meta.push_back({"prior", "NIG(" + num(s.vague_prior.theta0) + "," + num(s.vague_prior.nu0) + "," +
                                             num(s.vague_prior.alpha) + "," + num(s.vague_prior.beta) + ")"});
            }
            if (s.family == Family::normal_nig_informative) {
                meta.push_back({"prior", "NIG(theta+" + num(s.informative_offset) + "," + num(s.informative_nu0) +
                                             "," + num(s.informative_alpha) + "," + num(s.informative_beta) + ")"});
                meta.push_back({"prior_variance_label",
                                "implied prior variance of theta scales as 1/nu0 = " + num(1.0 / s.informative_nu0) +
                                    "; a larger nu0 is a tighter prior"});
            }
            break;
        case Family::mvn:
            meta.insert(meta.end(), {
                {"dim", std::to_string(s.dim)},
                {"contrasts", "unit vectors e_1..e_" + std::to_string(s.contrasts)},
                {"sigma", "unit variances, off-diagonal " + num(s.mvn_correlation)},
                {"mu", "components ~ N(0, var " + num(s.mu_var) + ")"},
                {"prior", "mu0 = 0, sigma0 = " + num(s.prior_variance) + " I"},
            });
            break;
    }
    return meta;
}

}  // namespace popeq
