#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "catoni.hpp"
#include "format.hpp"
#include "risk_prior.hpp"

// Monte-Carlo check that the certificate covers the population risk: draw
// synthetic samples from known population risks, fit the Gibbs posterior to
// the empirical risks, and count how often the certificate is violated.

namespace pacbayes {

// Known ground truth: per-predictor population risk and prior mass.
struct synthetic_world {
    std::vector<double> population_risks;
    std::vector<double> prior_masses;

    synthetic_world(std::vector<double> risks_in, std::vector<double> masses_in)
        : population_risks(std::move(risks_in)), prior_masses(std::move(masses_in)) {
        if (population_risks.size() != prior_masses.size())
            throw std::invalid_argument("synthetic_world: risks and masses differ in length");
        detail::check_mass_vector(prior_masses, "synthetic_world");
        detail::check_risks(population_risks, "synthetic_world");
    }

    std::size_t size() const { return population_risks.size(); }
};

struct coverage_report {
    std::size_t trials;
    std::size_t violations;
    double coverage;
    double wilson_low;
};

namespace detail {

// Counter-based generator: every (seed, index) pair yields an independent
// stream, so trials and predictors decouple without shared state.
struct counter_rng {
    std::uint64_t state;

    explicit counter_rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (0x9e3779b97f4a7c15ull + b + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// One-sided lower 95% confidence bound on a binomial proportion.
inline double wilson_lower_95(std::size_t successes, std::size_t total) {
    constexpr double z = 1.959963984540054;
    double nn = static_cast<double>(total);
    double phat = static_cast<double>(successes) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = phat + z2 / (2.0 * nn);
    double spread = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
    return (center - spread) / denom;
}

}  // namespace detail

// Per-predictor empirical risks from n Bernoulli draws at the population
// risk. Deterministic in (world, n, seed).
inline std::vector<double> simulate_empirical_risks(const synthetic_world& world, std::size_t n,
                                                    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_empirical_risks: n must be at least 1");
    std::vector<double> risks(world.size());
    for (std::size_t j = 0; j < world.size(); ++j) {
        detail::counter_rng rng(detail::mix_key(seed, j));
        std::size_t errors = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (rng.next_unit() < world.population_risks[j]) ++errors;
        risks[j] = static_cast<double>(errors) / static_cast<double>(n);
    }
    return risks;
}

// Fraction of trials where the certificate fit on simulated data covers the
// posterior population risk, with a one-sided lower confidence bound.
inline coverage_report run_coverage(const synthetic_world& world, std::size_t n, double lambda,
                                    double delta, std::size_t trials, std::uint64_t seed) {
    if (trials < 100) throw std::invalid_argument("run_coverage: need at least 100 trials");
    catoni_params params(n, delta, lambda);
    std::size_t violations = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> risks = simulate_empirical_risks(world, n, detail::mix_key(seed, t));
        finite_predictor_space space(std::move(risks), world.prior_masses);
        posterior_weights posterior = gibbs_posterior(space, lambda);
        double bound = catoni_bound(posterior, space, params);
        double population = 0.0;
        for (std::size_t j = 0; j < world.size(); ++j)
            population += posterior.masses[j] * world.population_risks[j];
        if (population > bound) ++violations;
    }
    double coverage =
        1.0 - static_cast<double>(violations) / static_cast<double>(trials);
    return {trials, violations,
            coverage, detail::wilson_lower_95(trials - violations, trials)};
}

struct coverage_scenario {
    synthetic_world world;
    std::size_t n;
    double lambda;
    double delta;
    std::size_t trials;
    std::uint64_t seed;
};

// Format: a leading "# key=value ..." line with n, lambda, delta, trials and
// seed, then population_risk,prior_mass rows.
inline coverage_scenario read_coverage_scenario(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("row 0: empty scenario");
    std::string_view head = strip_cr(line);
    if (head.size() < 2 || head[0] != '#')
        throw std::invalid_argument("row 0: expected a # parameter line");
    head.remove_prefix(1);

    bool have_n = false, have_lambda = false, have_delta = false, have_trials = false,
         have_seed = false;
    std::size_t n = 0, trials = 0;
    double lambda = 0.0, delta = 0.0;
    std::uint64_t seed = 0;
    std::istringstream head_in{std::string(head)};
    std::string token;
    while (head_in >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("row 0: malformed parameter '" + token + "'");
        std::string key = token.substr(0, eq);
        std::string_view value(token);
        value.remove_prefix(eq + 1);
        if (key == "n") {
            n = parse_csv_count(value, 0, "n");
            have_n = true;
        } else if (key == "lambda") {
            lambda = parse_csv_double(value, 0, "lambda");
            have_lambda = true;
        } else if (key == "delta") {
            delta = parse_csv_double(value, 0, "delta");
            have_delta = true;
        } else if (key == "trials") {
            trials = parse_csv_count(value, 0, "trials");
            have_trials = true;
        } else if (key == "seed") {
            seed = parse_csv_count(value, 0, "seed");
            have_seed = true;
        } else {
            throw std::invalid_argument("row 0: unknown parameter '" + key + "'");
        }
    }
    if (!(have_n && have_lambda && have_delta && have_trials && have_seed))
        throw std::invalid_argument("row 0: need n, lambda, delta, trials and seed");

    if (!std::getline(in, line) || strip_cr(line) != "population_risk,prior_mass")
        throw std::invalid_argument("row 1: expected header population_risk,prior_mass");
    std::vector<double> risks;
    std::vector<double> masses;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        std::string_view body = strip_cr(line);
        if (body.empty()) continue;
        auto fields = split_csv_line(body);
        if (fields.size() != 2)
            throw std::invalid_argument("row " + std::to_string(row) + ": expected 2 fields");
        risks.push_back(parse_csv_double(fields[0], row, "population_risk"));
        masses.push_back(parse_csv_double(fields[1], row, "prior_mass"));
    }
    return {synthetic_world(std::move(risks), std::move(masses)), n, lambda, delta, trials, seed};
}

inline void write_coverage_scenario(std::ostream& out, const coverage_scenario& scenario) {
    out << "# n=" << scenario.n << " lambda=" << format_double(scenario.lambda)
        << " delta=" << format_double(scenario.delta) << " trials=" << scenario.trials
        << " seed=" << scenario.seed << '\n';
    out << "population_risk,prior_mass\n";
    for (std::size_t j = 0; j < scenario.world.size(); ++j)
        out << format_double(scenario.world.population_risks[j]) << ','
            << format_double(scenario.world.prior_masses[j]) << '\n';
}

inline void write_coverage_report_json(std::ostream& out, const coverage_report& report) {
    out << "{\"trials\":" << report.trials << ",\"violations\":" << report.violations
        << ",\"coverage\":" << format_double(report.coverage)
        << ",\"wilson_low\":" << format_double(report.wilson_low) << "}\n";
}

}  // namespace pacbayes
