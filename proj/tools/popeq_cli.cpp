// popeq command-line tool.
//
// Exit codes: 0 success, 1 usage / input error, 2 numeric failure,
// 3 invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "popeq/popeq.hpp"

namespace {

using popeq::format_double;

// Bad value for a named flag.
class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

std::string g6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& flag, const std::string& text, std::size_t expected = 0) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        item = first == std::string::npos ? "" : item.substr(first, last - first + 1);
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size()) {
            throw UsageError(flag, "cannot parse '" + item + "' as a number");
        }
        out.push_back(v);
    }
    if (expected && out.size() != expected) {
        throw UsageError(flag, "expected " + std::to_string(expected) + " comma-separated values");
    }
    if (out.empty()) throw UsageError(flag, "expected at least one value");
    return out;
}

popeq::BetaParams parse_beta(const std::string& flag, const std::string& text) {
    const auto v = parse_list(flag, text, 2);
    if (!(v[0] > 0.0) || !(v[1] > 0.0)) throw UsageError(flag, "Beta parameters must be positive");
    return {v[0], v[1]};
}

std::string beta_text(const popeq::BetaParams& b) { return format_double(b.a) + "," + format_double(b.b); }

// Row-major numeric CSV, one matrix row per line.
popeq::Matrix read_matrix_csv(const std::string& flag, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(flag, "cannot open '" + path + "'");
    popeq::CsvReader reader(in);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        std::vector<double> values;
        for (std::size_t j = 0; j < row.size(); ++j) {
            values.push_back(popeq::parse_csv_number(row[j], reader.line(), std::to_string(j + 1)));
        }
        if (!rows.empty() && values.size() != rows.front().size()) {
            throw popeq::ParseError(path + ": ragged matrix row", reader.line());
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw UsageError(flag, "'" + path + "' holds no rows");
    popeq::Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

popeq::Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const popeq::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

using Meta = std::vector<std::pair<std::string, std::string>>;

void print_meta(const Meta& meta) {
    for (const auto& [k, v] : meta) std::cout << "# " << k << ": " << v << '\n';
}

void print_report(const popeq::TestReport& r, const std::string& label = "") {
    const std::string st = r.statistic ? g6(*r.statistic) : "NA";
    std::cout << label << "statistic " << st << '\n'
              << label << "p_one     " << g6(r.p_one) << '\n'
              << label << "p_two     " << g6(r.p_two) << '\n'
              << label << "pop_one   " << g6(r.pop_one) << '\n'
              << label << "pop_two   " << g6(r.pop_two) << '\n';
}

std::string report_row(const popeq::TestReport& r, std::string (*fmt)(double)) {
    return (r.statistic ? fmt(*r.statistic) : std::string("NA")) + "," + fmt(r.p_one) + "," + fmt(r.p_two) + "," +
           fmt(r.pop_one) + "," + fmt(r.pop_two);
}

std::string full(double v) { return format_double(v); }

void write_report_csv(const std::string& path, const std::vector<std::string>& labels,
                      const std::vector<popeq::TestReport>& reports) {
    std::ofstream out(path);
    if (!out) throw UsageError("--csv", "cannot write '" + path + "'");
    out << "label,statistic,p_one,p_two,pop_one,pop_two\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out << popeq::quote_csv_field(labels[i]) << ',' << report_row(reports[i], full) << '\n';
    }
}

std::ofstream open_output(const std::string& flag, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError(flag, "cannot write '" + path + "'");
    return out;
}

popeq::BetaQuadrature make_quadrature(int order, int panels) {
    if (order < 2) throw UsageError("--quad-order", "must be at least 2");
    if (panels < 1) throw UsageError("--quad-panels", "must be positive");
    return {popeq::gauss_legendre(order), panels};
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

struct TestOptions {
    std::int64_t n = -1;
    std::int64_t ye = -1;
    std::int64_t ys = -1;
    double p0 = 0.2;
    std::string prior_e = "0.2,0.8";
    std::string prior_s = "0.2,0.8";
    std::string prior_one = "1,1";
    std::string two_sided = "doubled-tail";
    int quad_order = popeq::default_quadrature_order;
    int quad_panels = 1;
    double theta_hat = 0.0;
    std::optional<double> ssd;
    std::string x_list;
    std::string data_path;
    std::string normal_prior = "jeffreys";
    std::string nig = "0,100,0.01,0.01";
    std::string xbar;
    std::string sigma_path;
    std::string contrasts_path;
    std::string mu0;
    std::string sigma0_path;
    double prior_var = 1000.0;
    double alpha = 0.05;
    std::string csv;
};

void require_count(const std::string& flag, std::int64_t v, std::int64_t lo, std::int64_t hi) {
    if (v < lo || v > hi) {
        throw UsageError(flag, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

int run_test_binary2(const TestOptions& o) {
    require_count("--n", o.n, 1, 1000000);
    require_count("--ye", o.ye, 0, o.n);
    require_count("--ys", o.ys, 0, o.n);
    const popeq::TwoArmPriors priors{parse_beta("--prior-e", o.prior_e), parse_beta("--prior-s", o.prior_s)};
    const popeq::BetaQuadrature quad = make_quadrature(o.quad_order, o.quad_panels);
    const popeq::TwoArmBinomialData d{o.n, o.ye, o.ys};
    const popeq::ZStatistic z = popeq::two_sample_z(d);
    const popeq::TestReport r = popeq::two_sample_report(d, priors, quad);
    print_meta({{"version", std::string(popeq::version)},
                {"test", "binary2"},
                {"data", "n=" + std::to_string(o.n) + " y_e=" + std::to_string(o.ye) + " y_s=" + std::to_string(o.ys)},
                {"prior_e", beta_text(priors.experimental)},
                {"prior_s", beta_text(priors.standard)},
                {"quadrature", "gauss-legendre order " + std::to_string(o.quad_order) + " x " +
                                   std::to_string(o.quad_panels) + " panel(s) per side, logit scale"},
                {"degenerate_z", z.degenerate ? "yes (Z = 0 by convention)" : "no"},
                {"row", "statistic,p_one,p_two,pop_one,pop_two"}});
    print_report(r);
    std::cout << "row," << report_row(r, g6) << '\n';
    if (!o.csv.empty()) write_report_csv(o.csv, {"binary2"}, {r});
    return 0;
}

int run_test_binary1(const TestOptions& o) {
    require_count("--n", o.n, 1, 100000000);
    require_count("--ye", o.ye, 0, o.n);
    if (!(o.p0 > 0.0 && o.p0 < 1.0)) throw UsageError("--p0", "must lie in (0,1)");
    const popeq::BetaParams prior = parse_beta("--prior", o.prior_one);
    popeq::TwoSidedBinomialMethod method;
    try {
        method = popeq::parse_two_sided_method(o.two_sided);
    } catch (const popeq::ConfigError& e) {
        throw UsageError("--two-sided", e.what());
    }
    const popeq::TestReport r = popeq::one_sample_report({o.n, o.ye, o.p0}, prior, method);
    print_meta({{"version", std::string(popeq::version)},
                {"test", "binary1"},
                {"data", "n=" + std::to_string(o.n) + " y_e=" + std::to_string(o.ye) + " p0=" + format_double(o.p0)},
                {"prior", beta_text(prior)},
                {"two_sided_binomial", popeq::to_string(method)},
                {"row", "statistic,p_one,p_two,pop_one,pop_two"}});
    print_report(r);
    std::cout << "row," << report_row(r, g6) << '\n';
    if (!o.csv.empty()) write_report_csv(o.csv, {"binary1"}, {r});
    return 0;
}

int run_test_normal_known(const TestOptions& o) {
    require_count("--n", o.n, 1, std::numeric_limits<std::int64_t>::max() / 2);
    if (!std::isfinite(o.theta_hat)) throw UsageError("--theta-hat", "must be finite");
    const popeq::TestReport r = popeq::known_variance_report(o.theta_hat, o.n);
    print_meta({{"version", std::string(popeq::version)},
                {"test", "normal-known"},
                {"data", "n=" + std::to_string(o.n) + " theta_hat=" + format_double(o.theta_hat)},
                {"model", "x_i ~ N(theta, 2), flat prior on theta"},
                {"row", "statistic,p_one,p_two,pop_one,pop_two"}});
    print_report(r);
    std::cout << "row," << report_row(r, g6) << '\n';
    if (!o.csv.empty()) write_report_csv(o.csv, {"normal-known"}, {r});
    return 0;
}

std::vector<double> read_column(const std::string& flag, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(flag, "cannot open '" + path + "'");
    popeq::CsvReader reader(in);
    std::vector<std::string> row;
    std::vector<double> x;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 1) throw popeq::ParseError(path + ": expected one value per line", reader.line());
        x.push_back(popeq::parse_csv_number(row[0], reader.line(), "x"));
    }
    return x;
}

int run_test_normal_t(const TestOptions& o) {
    popeq::PairedNormalData d;
    std::string source;
    if (!o.x_list.empty() || !o.data_path.empty()) {
        if (!o.x_list.empty() && !o.data_path.empty()) throw UsageError("--x", "give either --x or --data, not both");
        const std::vector<double> x = o.x_list.empty() ? read_column("--data", o.data_path) : parse_list("--x", o.x_list);
        if (x.size() < 2) throw UsageError(o.x_list.empty() ? "--data" : "--x", "need at least two observations");
        d = popeq::summarize_differences(x);
        source = o.x_list.empty() ? "file " + o.data_path : "--x";
    } else {
        if (!o.ssd) throw UsageError("--ssd", "required unless --x or --data is given");
        require_count("--n", o.n, 2, std::numeric_limits<std::int64_t>::max() / 2);
        if (!(*o.ssd >= 0.0)) throw UsageError("--ssd", "must be nonnegative");
        d = {o.n, o.theta_hat, *o.ssd};
        source = "summary flags";
    }
    popeq::NormalPrior kind;
    if (o.normal_prior == "jeffreys") {
        kind = popeq::NormalPrior::jeffreys;
    } else if (o.normal_prior == "nig") {
        kind = popeq::NormalPrior::nig;
    } else {
        throw UsageError("--prior", "must be 'jeffreys' or 'nig'");
    }
    const auto nig = parse_list("--nig", o.nig, 4);
    const popeq::NigParams nig_prior{nig[0], nig[1], nig[2], nig[3]};
    if (!(nig_prior.nu0 > 0.0 && nig_prior.alpha > 0.0 && nig_prior.beta > 0.0)) {
        throw UsageError("--nig", "nu0, alpha and beta must be positive");
    }
    const popeq::TestReport r = popeq::unknown_variance_report(d, kind, nig_prior);
    Meta meta = {{"version", std::string(popeq::version)},
                 {"test", "normal-t"},
                 {"data", "n=" + std::to_string(d.n) + " theta_hat=" + format_double(d.theta_hat) +
                              " ssd=" + format_double(d.ssd) + " (from " + source + ")"}};
    if (kind == popeq::NormalPrior::jeffreys) {
        meta.push_back({"prior", "jeffreys p(theta,nu) ~ nu^(-3/2); theta | D ~ t_n"});
    } else {
        meta.push_back({"prior", "NIG(" + o.nig + "); nu0 is the prior precision multiplier"});
    }
    meta.push_back({"row", "statistic,p_one,p_two,pop_one,pop_two"});
    print_meta(meta);
    print_report(r);
    std::cout << "row," << report_row(r, g6) << '\n';
    if (!o.csv.empty()) write_report_csv(o.csv, {"normal-t"}, {r});
    return 0;
}

int run_test_mvn(const TestOptions& o) {
    require_count("--n", o.n, 1, std::numeric_limits<std::int64_t>::max() / 2);
    if (o.xbar.empty()) throw UsageError("--xbar", "required");
    if (o.sigma_path.empty()) throw UsageError("--sigma", "required");
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha", "must lie in (0,1)");
    popeq::MvnSample s{o.n, to_vector(parse_list("--xbar", o.xbar)), read_matrix_csv("--sigma", o.sigma_path)};
    const auto p = s.dim();
    if (s.sigma.rows() != p || s.sigma.cols() != p) throw UsageError("--sigma", "must be " + std::to_string(p) + " x " + std::to_string(p));
    try {
        popeq::validate(s);
    } catch (const popeq::DomainError& e) {
        throw UsageError("--sigma", e.what());
    }
    popeq::ContrastSet set;
    if (o.contrasts_path.empty()) {
        set = popeq::ContrastSet::unit_vectors(p, p);
    } else {
        const popeq::Matrix c = read_matrix_csv("--contrasts", o.contrasts_path);
        if (c.cols() != p) throw UsageError("--contrasts", "each row must have " + std::to_string(p) + " entries");
        for (Eigen::Index k = 0; k < c.rows(); ++k) set.contrasts.push_back(c.row(k).transpose());
        try {
            popeq::validate(set, p);
        } catch (const popeq::DomainError& e) {
            throw UsageError("--contrasts", e.what());
        }
    }
    popeq::MvnPrior prior = popeq::MvnPrior::vague(p, o.prior_var);
    if (!(o.prior_var > 0.0)) throw UsageError("--prior-var", "must be positive");
    if (!o.mu0.empty()) {
        prior.mu0 = to_vector(parse_list("--mu0", o.mu0, static_cast<std::size_t>(p)));
    }
    if (!o.sigma0_path.empty()) {
        prior.sigma0 = read_matrix_csv("--sigma0", o.sigma0_path);
        if (prior.sigma0.rows() != p || prior.sigma0.cols() != p) throw UsageError("--sigma0", "dimension mismatch");
        try {
            popeq::detail::require_spd(prior.sigma0, "sigma0");
        } catch (const popeq::DomainError& e) {
            throw UsageError("--sigma0", e.what());
        }
    }
    const popeq::MvnReport report = popeq::mvn_report(s, set, prior, o.alpha);
    print_meta({{"version", std::string(popeq::version)},
                {"test", "mvn"},
                {"data", "n=" + std::to_string(o.n) + " p=" + std::to_string(p) + " K=" +
                             std::to_string(set.contrasts.size())},
                {"contrasts", o.contrasts_path.empty() ? "unit vectors" : "file " + o.contrasts_path},
                {"prior", o.sigma0_path.empty() ? "sigma0 = " + format_double(o.prior_var) + " I" : "sigma0 from " + o.sigma0_path},
                {"alpha", format_double(o.alpha)},
                {"row", "contrast,statistic,p_one,p_two,pop_one,pop_two"}});
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < report.per_contrast.size(); ++k) {
        const std::string label = "c" + std::to_string(k + 1);
        labels.push_back(label);
        print_report(report.per_contrast[k], label + " ");
    }
    std::cout << "iut_reject_one_sided " << (report.reject_one_sided ? "yes" : "no") << '\n'
              << "iut_reject_two_sided " << (report.reject_two_sided ? "yes" : "no") << '\n';
    for (std::size_t k = 0; k < report.per_contrast.size(); ++k) {
        std::cout << "row," << labels[k] << ',' << report_row(report.per_contrast[k], g6) << '\n';
    }
    if (!o.csv.empty()) write_report_csv(o.csv, labels, report.per_contrast);
    return 0;
}

// ---------------------------------------------------------------------------
// oc / samplesize
// ---------------------------------------------------------------------------

struct DesignOptions {
    double alpha = 0.10;
    double power = 0.80;
    double p_s = 0.2;
    double p_e = 0.3;
    std::optional<std::int64_t> n;
    std::optional<double> eta;
    std::string prior_e = "0.2,0.8";
    std::string prior_s = "0.2,0.8";
    int quad_order = popeq::default_quadrature_order;
    int quad_panels = 1;
    double grid_step = 0.01;
    bool calibrate = false;
    std::optional<double> calibrate_target;
    double eta_step = 1e-4;
    unsigned threads = 1;
    std::string csv;
};

popeq::DesignSpec design_from(const DesignOptions& o) {
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha", "must lie in (0,1)");
    if (!(o.power > 0.0 && o.power < 1.0)) throw UsageError("--power", "must lie in (0,1)");
    if (!(o.p_s > 0.0 && o.p_s < 1.0)) throw UsageError("--ps", "must lie in (0,1)");
    if (!(o.p_e > o.p_s && o.p_e < 1.0)) throw UsageError("--pe", "must lie in (ps, 1)");
    if (o.n && *o.n < 1) throw UsageError("--n", "must be at least 1");
    if (o.eta && !(*o.eta > 0.0 && *o.eta < 1.0)) throw UsageError("--eta", "must lie in (0,1)");
    popeq::DesignSpec d;
    d.alpha = o.alpha;
    d.target_power = o.power;
    d.p_s = o.p_s;
    d.p_e_alt = o.p_e;
    d.n = o.n;
    d.eta = o.eta;
    d.priors = {parse_beta("--prior-e", o.prior_e), parse_beta("--prior-s", o.prior_s)};
    return d;
}

int run_samplesize(const DesignOptions& o) {
    const popeq::DesignSpec d = design_from(o);
    const double raw = popeq::sample_size_unrounded(d.alpha, d.target_power, d.p_s, d.p_e_alt);
    const std::int64_t n = popeq::sample_size(d.alpha, d.target_power, d.p_s, d.p_e_alt);
    print_meta({{"version", std::string(popeq::version)},
                {"design", "alpha=" + format_double(d.alpha) + " power=" + format_double(d.target_power) +
                               " p_s=" + format_double(d.p_s) + " p_e=" + format_double(d.p_e_alt)},
                {"rounding", "up to the next integer"},
                {"row", "n_unrounded,n"}});
    std::cout << "n_unrounded " << g6(raw) << '\n' << "n           " << n << '\n';
    std::cout << "row," << g6(raw) << ',' << n << '\n';
    return 0;
}

int run_oc(const DesignOptions& o) {
    const popeq::DesignSpec d = design_from(o);
    if (!(o.grid_step > 0.0 && o.grid_step < 1.0)) throw UsageError("--grid-step", "must lie in (0,1)");
    if (!(o.eta_step > 0.0 && o.eta_step < 0.5)) throw UsageError("--eta-step", "must lie in (0, 0.5)");
    popeq::DesignEvaluator ev(d, make_quadrature(o.quad_order, o.quad_panels), o.threads);
    const popeq::ErrorRates freq = ev.error_rates(popeq::DecisionRule::frequentist);
    const popeq::ErrorRates bayes = ev.error_rates(popeq::DecisionRule::bayesian);
    const std::int64_t disagree =
        ev.region(popeq::DecisionRule::frequentist).disagreements(ev.region(popeq::DecisionRule::bayesian));
    const double cells = static_cast<double>((ev.n() + 1) * (ev.n() + 1));

    Meta meta = {{"version", std::string(popeq::version)},
                 {"design", "alpha=" + format_double(d.alpha) + " power=" + format_double(d.target_power) +
                                " p_s=" + format_double(d.p_s) + " p_e=" + format_double(d.p_e_alt)},
                 {"n", std::to_string(ev.n()) + (d.n ? " (given)" : " (sample-size formula, rounded up)")},
                 {"eta", format_double(ev.eta()) + (d.eta ? " (given)" : " (1 - alpha)")},
                 {"prior_e", beta_text(d.priors.experimental)},
                 {"prior_s", beta_text(d.priors.standard)},
                 {"quadrature", "gauss-legendre order " + std::to_string(o.quad_order) + " x " +
                                    std::to_string(o.quad_panels) + " panel(s) per side, logit scale"},
                 {"degenerate_z", "Z = 0, never rejects"},
                 {"threads", std::to_string(o.threads)},
                 {"row", "rule,type1,type2,power"}};
    std::optional<popeq::EtaCalibration> cal;
    if (o.calibrate) {
        const double target = o.calibrate_target.value_or(d.alpha);
        if (!(target > 0.0 && target < 1.0)) throw UsageError("--calibrate-target", "must lie in (0,1)");
        cal = ev.calibrate_eta(target, o.eta_step);
        meta.push_back({"calibration", "smallest eta on grid step " + format_double(o.eta_step) +
                                           " with exact type I error <= " + format_double(target)});
    }
    std::vector<double> grid;
    if (!o.csv.empty()) {
        grid = popeq::default_power_grid(d, o.grid_step);
        meta.push_back({"power_grid", "p_s to p_s + 2 delta in steps of " + format_double(o.grid_step) +
                                          " (tool choice)"});
    }
    print_meta(meta);
    std::cout << "rule         type1     type2     power\n";
    auto line = [](const char* name, const popeq::ErrorRates& r) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-12s %-9s %-9s %s\n", name, g6(r.type1).c_str(), g6(r.type2).c_str(),
                      g6(r.power).c_str());
        std::cout << buf;
    };
    line("frequentist", freq);
    line("bayesian", bayes);
    std::cout << "region_disagreement " << disagree << " of " << static_cast<std::int64_t>(cells) << " ("
              << g6(disagree / cells) << ")\n";
    if (cal) std::cout << "calibrated_eta " << g6(cal->eta) << " achieved_type1 " << g6(cal->achieved_type1) << '\n';
    std::cout << "row,frequentist," << g6(freq.type1) << ',' << g6(freq.type2) << ',' << g6(freq.power) << '\n';
    std::cout << "row,bayesian," << g6(bayes.type1) << ',' << g6(bayes.type2) << ',' << g6(bayes.power) << '\n';
    if (!o.csv.empty()) {
        std::ofstream out = open_output("--csv", o.csv);
        popeq::write_power_curve_csv(out, {{popeq::DecisionRule::frequentist, ev.power_curve(popeq::DecisionRule::frequentist, grid)},
                                           {popeq::DecisionRule::bayesian, ev.power_curve(popeq::DecisionRule::bayesian, grid)}});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / plot
// ---------------------------------------------------------------------------

struct SimulateOptions {
    popeq::ScenarioSpec spec;
    std::string family = "binary-two-sample";
    std::uint64_t seed = 42;
    std::string prior_e = "0.2,0.8";
    std::string prior_s = "0.2,0.8";
    std::string prior_one = "1,1";
    std::string two_sided = "doubled-tail";
    std::string nig_vague = "0,100,0.01,0.01";
    std::string shape = "gamma";
    std::string gamma_convention = "shape-scale";
    unsigned threads = 1;
    std::string out;
    std::string svg;
    std::string meta;
    std::string side = "one";
};

popeq::ScenarioSpec resolve_scenario(SimulateOptions& o) {
    popeq::ScenarioSpec s = o.spec;
    auto wrap = [](const std::string& flag, auto&& f) {
        try {
            return f();
        } catch (const popeq::ConfigError& e) {
            throw UsageError(flag, e.what());
        }
    };
    s.family = wrap("--family", [&] { return popeq::parse_family(o.family); });
    s.seed = {o.seed};
    s.two_arm_priors = {parse_beta("--prior-e", o.prior_e), parse_beta("--prior-s", o.prior_s)};
    s.one_arm_prior = parse_beta("--prior", o.prior_one);
    s.two_sided_method = wrap("--two-sided", [&] { return popeq::parse_two_sided_method(o.two_sided); });
    const auto nig = parse_list("--nig-vague", o.nig_vague, 4);
    s.vague_prior = {nig[0], nig[1], nig[2], nig[3]};
    s.nonnormal_shape = wrap("--shape", [&] { return popeq::parse_nonnormal_shape(o.shape); });
    s.gamma_convention = wrap("--gamma-convention", [&] { return popeq::parse_gamma_convention(o.gamma_convention); });
    if (o.side != "one" && o.side != "two") throw UsageError("--side", "must be 'one' or 'two'");
    popeq::validate(s);
    return s;
}

std::vector<std::pair<double, double>> scatter_points(const std::vector<popeq::ReplicationRecord>& records,
                                                      bool two_sided) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(records.size());
    for (const auto& r : records) pts.emplace_back(two_sided ? r.p_two : r.p_one, two_sided ? r.pop_two : r.pop_one);
    return pts;
}

nlohmann::ordered_json stats_json(const popeq::SummaryStats& s) {
    nlohmann::ordered_json j;
    j["count"] = s.count;
    j["max_abs_diff"] = s.max_abs_diff;
    j["mean_abs_diff"] = s.mean_abs_diff;
    j["median_abs_diff"] = s.median_abs_diff;
    j["pearson_r"] = s.pearson_r ? nlohmann::ordered_json(*s.pearson_r) : nlohmann::ordered_json(nullptr);
    return j;
}

void print_stats(const char* label, const popeq::SummaryStats& s) {
    std::cout << label << " count " << s.count << " max " << g6(s.max_abs_diff) << " mean " << g6(s.mean_abs_diff)
              << " median " << g6(s.median_abs_diff) << " pearson_r "
              << (s.pearson_r ? g6(*s.pearson_r) : std::string("NA")) << '\n';
}

int run_simulate(SimulateOptions& o) {
    const popeq::ScenarioSpec s = resolve_scenario(o);
    const auto records = popeq::run_scenario(s, o.threads);
    const popeq::ScenarioSummary summary = popeq::summarize(records);
    Meta meta = popeq::scenario_metadata(s);
    meta.push_back({"threads", std::to_string(o.threads)});
    if (!o.out.empty()) meta.push_back({"records_csv", o.out});
    if (!o.svg.empty()) meta.push_back({"svg", o.svg + " (" + o.side + "-sided pairs)"});
    print_meta(meta);
    print_stats("one_sided", summary.one_sided);
    print_stats("two_sided", summary.two_sided);
    if (!o.out.empty()) {
        std::ofstream out = open_output("--out", o.out);
        popeq::write_records_csv(out, popeq::record_field_names(s.family), records);
    }
    if (!o.svg.empty()) {
        std::ofstream out = open_output("--svg", o.svg);
        out << popeq::render_scatter_svg(scatter_points(records, o.side == "two"));
    }
    if (!o.meta.empty()) {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : meta) j["config"][k] = v;
        j["summary"]["one_sided"] = stats_json(summary.one_sided);
        j["summary"]["two_sided"] = stats_json(summary.two_sided);
        std::ofstream out = open_output("--meta", o.meta);
        out << j.dump(2) << '\n';
    }
    return 0;
}

int run_plot(const std::string& in_path, const std::string& out_path, const std::string& side) {
    if (side != "one" && side != "two") throw UsageError("--side", "must be 'one' or 'two'");
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw UsageError("--in", "cannot open '" + in_path + "'");
    const popeq::RecordTable table = popeq::read_records_csv(in);
    const auto pts = scatter_points(table.records, side == "two");
    const std::string svg = popeq::render_scatter_svg(pts);
    std::vector<double> p;
    std::vector<double> q;
    for (const auto& [x, y] : pts) {
        p.push_back(x);
        q.push_back(y);
    }
    const popeq::SummaryStats stats = popeq::summarize_pairs(p, q);
    print_meta({{"version", std::string(popeq::version)},
                {"input", in_path},
                {"output", out_path},
                {"pairs", side + "-sided (p-value on x, posterior probability on y)"}});
    std::cout << "markers " << pts.size() << '\n'
              << "max_vertical_deviation " << g6(stats.max_abs_diff) << '\n';
    std::ofstream out = open_output("--out", out_path);
    out << svg;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"popeq: frequentist p-values beside posterior probabilities of the null"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(popeq::version));

    // test
    TestOptions t;
    CLI::App* test = app.add_subcommand("test", "Test a single dataset");
    test->require_subcommand(1);

    CLI::App* b2 = test->add_subcommand("binary2", "Two-arm binomial: Z test and Pr(p_E <= p_S | data)");
    b2->add_option("--n", t.n, "Per-arm sample size")->required();
    b2->add_option("--ye", t.ye, "Responders, experimental arm")->required();
    b2->add_option("--ys", t.ys, "Responders, standard arm")->required();
    b2->add_option("--prior-e", t.prior_e, "Beta prior a,b for the experimental arm")->capture_default_str();
    b2->add_option("--prior-s", t.prior_s, "Beta prior a,b for the standard arm")->capture_default_str();
    b2->add_option("--quad-order", t.quad_order, "Gauss-Legendre order")->capture_default_str();
    b2->add_option("--quad-panels", t.quad_panels, "Panels per side of the mode")->capture_default_str();
    b2->add_option("--csv", t.csv, "Write the report at full precision to this CSV file");

    CLI::App* b1 = test->add_subcommand("binary1", "One-arm binomial: exact test and Pr(p_E <= p0 | data)");
    b1->add_option("--n", t.n, "Sample size")->required();
    b1->add_option("--ye", t.ye, "Responders")->required();
    b1->add_option("--p0", t.p0, "Reference response rate")->capture_default_str();
    b1->add_option("--prior", t.prior_one, "Beta prior a,b")->capture_default_str();
    b1->add_option("--two-sided", t.two_sided, "doubled-tail | minimum-likelihood")->capture_default_str();
    b1->add_option("--csv", t.csv, "Write the report at full precision to this CSV file");

    CLI::App* nk = test->add_subcommand("normal-known", "Paired normal differences, known variance");
    nk->add_option("--theta-hat", t.theta_hat, "Mean difference")->required();
    nk->add_option("--n", t.n, "Number of pairs")->required();
    nk->add_option("--csv", t.csv, "Write the report at full precision to this CSV file");

    CLI::App* nt = test->add_subcommand("normal-t", "Paired normal differences, unknown variance");
    nt->add_option("--x", t.x_list, "Comma-separated differences");
    nt->add_option("--data", t.data_path, "File with one difference per line");
    nt->add_option("--n", t.n, "Number of pairs (summary input)");
    nt->add_option("--theta-hat", t.theta_hat, "Mean difference (summary input)");
    nt->add_option("--ssd", t.ssd, "Sum of squared deviations (summary input)");
    nt->add_option("--prior", t.normal_prior, "jeffreys | nig")->capture_default_str();
    nt->add_option("--nig", t.nig, "NIG prior theta0,nu0,alpha,beta")->capture_default_str();
    nt->add_option("--csv", t.csv, "Write the report at full precision to this CSV file");

    CLI::App* mv = test->add_subcommand("mvn", "Multivariate normal mean, known covariance");
    mv->add_option("--n", t.n, "Sample size")->required();
    mv->add_option("--xbar", t.xbar, "Comma-separated sample mean vector")->required();
    mv->add_option("--sigma", t.sigma_path, "Row-major CSV file with the known covariance")->required();
    mv->add_option("--contrasts", t.contrasts_path, "Row-major CSV, one contrast per row (default: unit vectors)");
    mv->add_option("--mu0", t.mu0, "Prior mean (default 0)");
    mv->add_option("--sigma0", t.sigma0_path, "Row-major CSV prior covariance (default prior-var * I)");
    mv->add_option("--prior-var", t.prior_var, "Prior variance for the default sigma0")->capture_default_str();
    mv->add_option("--alpha", t.alpha, "Level of the intersection-union test")->capture_default_str();
    mv->add_option("--csv", t.csv, "Write the per-contrast reports at full precision to this CSV file");

    // oc / samplesize
    DesignOptions d;
    auto add_design = [&d](CLI::App* sub) {
        sub->add_option("--alpha", d.alpha, "One-sided significance level")->capture_default_str();
        sub->add_option("--power", d.power, "Target power")->capture_default_str();
        sub->add_option("--ps", d.p_s, "Standard-arm response rate")->capture_default_str();
        sub->add_option("--pe", d.p_e, "Experimental-arm response rate under the alternative")->capture_default_str();
    };
    CLI::App* oc = app.add_subcommand("oc", "Exact operating characteristics of a two-arm design");
    add_design(oc);
    oc->add_option("--n", d.n, "Per-arm size (default: sample-size formula)");
    oc->add_option("--eta", d.eta, "Posterior threshold (default 1 - alpha)");
    oc->add_option("--prior-e", d.prior_e, "Beta prior a,b for the experimental arm")->capture_default_str();
    oc->add_option("--prior-s", d.prior_s, "Beta prior a,b for the standard arm")->capture_default_str();
    oc->add_option("--quad-order", d.quad_order, "Gauss-Legendre order")->capture_default_str();
    oc->add_option("--quad-panels", d.quad_panels, "Panels per side of the mode")->capture_default_str();
    oc->add_flag("--calibrate", d.calibrate, "Search the eta grid for the exact type I error target");
    oc->add_option("--calibrate-target", d.calibrate_target, "Target type I error (default alpha)");
    oc->add_option("--eta-step", d.eta_step, "Eta grid step")->capture_default_str();
    oc->add_option("--grid-step", d.grid_step, "Power-curve grid step")->capture_default_str();
    oc->add_option("--csv", d.csv, "Write power curves (p_E,rule,type1_or_power) to this CSV file");
    oc->add_option("--threads", d.threads, "Worker threads")->capture_default_str();

    CLI::App* ss = app.add_subcommand("samplesize", "Per-arm sample size for a two-arm design");
    add_design(ss);

    // simulate
    SimulateOptions so;
    popeq::ScenarioSpec& sp = so.spec;
    CLI::App* sim = app.add_subcommand("simulate", "Run a seeded replication scenario");
    // CLI11 reads config files on the root app only; keys live under [simulate].
    app.set_config("--config", "", "TOML/INI file; simulate options go under [simulate], keys are flag names");
    sim->fallthrough();
    sim->add_option("--family", so.family,
                    "binary-two-sample | binary-one-sample | normal-jeffreys | normal-nig-vague | "
                    "normal-nig-informative | normal-nonnormal | mvn")
        ->capture_default_str();
    sim->add_option("--n", sp.n, "Per-arm / per-sample size")->capture_default_str();
    sim->add_option("--reps", sp.reps, "Replications")->capture_default_str();
    sim->add_option("--seed", so.seed, "Master seed")->capture_default_str();
    sim->add_option("--threads", so.threads, "Worker threads (output does not depend on it)")->capture_default_str();
    sim->add_option("--out", so.out, "Records CSV");
    sim->add_option("--svg", so.svg, "Scatter plot SVG");
    sim->add_option("--side", so.side, "Pairs plotted in the SVG: one | two")->capture_default_str();
    sim->add_option("--meta", so.meta, "JSON file with resolved configuration and summary");
    sim->add_option("--prior-e", so.prior_e, "Two-sample Beta prior, experimental arm")->capture_default_str();
    sim->add_option("--prior-s", so.prior_s, "Two-sample Beta prior, standard arm")->capture_default_str();
    sim->add_option("--prior", so.prior_one, "One-sample Beta prior")->capture_default_str();
    sim->add_option("--p0", sp.p0, "One-sample reference rate")->capture_default_str();
    sim->add_option("--two-sided", so.two_sided, "doubled-tail | minimum-likelihood")->capture_default_str();
    sim->add_option("--quad-order", sp.quadrature_order, "Gauss-Legendre order")->capture_default_str();
    sim->add_option("--quad-panels", sp.quadrature_panels, "Panels per side of the mode")->capture_default_str();
    sim->add_option("--theta-mean", sp.theta_mean, "Mean of theta")->capture_default_str();
    sim->add_option("--theta-var", sp.theta_var, "Variance of theta")->capture_default_str();
    sim->add_option("--nu-mean", sp.nu_mean, "Mean of nu before truncation at 0")->capture_default_str();
    sim->add_option("--nu-var", sp.nu_var, "Variance of nu before truncation at 0")->capture_default_str();
    sim->add_option("--nig-vague", so.nig_vague, "NIG prior theta0,nu0,alpha,beta for normal-nig-vague")
        ->capture_default_str();
    sim->add_option("--informative-offset", sp.informative_offset, "theta0 = theta + offset")->capture_default_str();
    sim->add_option("--informative-nu0", sp.informative_nu0, "nu0 of the informative prior")->capture_default_str();
    sim->add_option("--informative-alpha", sp.informative_alpha, "alpha of the informative prior")
        ->capture_default_str();
    sim->add_option("--informative-beta", sp.informative_beta, "beta of the informative prior")->capture_default_str();
    sim->add_option("--shape", so.shape, "Non-normal family: gamma | beta | mixture")->capture_default_str();
    sim->add_option("--gamma-shape", sp.gamma_shape, "Gamma shape")->capture_default_str();
    sim->add_option("--gamma-param", sp.gamma_param, "Gamma scale (or rate)")->capture_default_str();
    sim->add_option("--gamma-convention", so.gamma_convention, "shape-scale | shape-rate")->capture_default_str();
    sim->add_option("--beta-a", sp.beta_a, "Beta a")->capture_default_str();
    sim->add_option("--beta-b", sp.beta_b, "Beta b")->capture_default_str();
    sim->add_option("--mixture-offset", sp.mixture_offset, "Mixture components N(-m,1), N(m,1)")->capture_default_str();
    sim->add_option("--recenter-lo", sp.recenter_lo, "Lower end of the recentering uniform")->capture_default_str();
    sim->add_option("--recenter-hi", sp.recenter_hi, "Upper end of the recentering uniform")->capture_default_str();
    sim->add_option("--dim", sp.dim, "Multivariate dimension")->capture_default_str();
    sim->add_option("--contrasts", sp.contrasts, "Number of unit-vector contrasts")->capture_default_str();
    sim->add_option("--correlation", sp.mvn_correlation, "Off-diagonal of the unit-variance sigma")
        ->capture_default_str();
    sim->add_option("--mu-var", sp.mu_var, "Variance of the mean components")->capture_default_str();
    sim->add_option("--prior-var", sp.prior_variance, "Vague prior variance")->capture_default_str();

    // plot
    std::string plot_in;
    std::string plot_out;
    std::string plot_side = "one";
    CLI::App* plot = app.add_subcommand("plot", "Render a records CSV as an SVG scatter");
    plot->add_option("--in", plot_in, "Records CSV")->required();
    plot->add_option("--out", plot_out, "Output SVG")->required();
    plot->add_option("--side", plot_side, "one | two")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*b2) return run_test_binary2(t);
        if (*b1) return run_test_binary1(t);
        if (*nk) return run_test_normal_known(t);
        if (*nt) return run_test_normal_t(t);
        if (*mv) return run_test_mvn(t);
        if (*oc) return run_oc(d);
        if (*ss) return run_samplesize(d);
        if (*sim) return run_simulate(so);
        if (*plot) return run_plot(plot_in, plot_out, plot_side);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const popeq::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const popeq::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const popeq::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const popeq::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    } catch (const popeq::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
