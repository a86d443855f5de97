#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "numerics.hpp"
#include "risk_prior.hpp"

// Exponential-moment risk certificate over a finite predictor class, the
// Gibbs posterior that minimises it, and the closed-form minimum for
// two-point risk priors.

namespace pacbayes {

// Certificate parameters: sample size n, failure budget delta, temperature
// lambda. Certificate holds with probability at least 1 - delta.
struct catoni_params {
    std::size_t n;
    double delta;
    double lambda;

    catoni_params(std::size_t n_in, double delta_in, double lambda_in)
        : n(n_in), delta(delta_in), lambda(lambda_in) {
        if (n < 1) throw std::invalid_argument("catoni_params: n must be at least 1");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("catoni_params: delta outside (0,1)");
        if (!(lambda > 0.0)) throw std::invalid_argument("catoni_params: lambda must be positive");
    }

    // Posterior-independent part of the certificate.
    double offset() const {
        double nn = static_cast<double>(n);
        return 1.0 / (8.0 * nn * lambda) - lambda * std::log(delta);
    }
};

struct posterior_weights {
    std::vector<double> masses;

    explicit posterior_weights(std::vector<double> masses_in) : masses(std::move(masses_in)) {
        detail::check_mass_vector(masses, "posterior_weights");
    }

    std::size_t size() const { return masses.size(); }
};

// KL divergence between two mass vectors on the same index set. Infinite
// when the posterior charges an index the prior does not.
inline double kl_discrete(const posterior_weights& posterior,
                          const std::vector<double>& prior_masses) {
    if (posterior.size() != prior_masses.size())
        throw std::invalid_argument("kl_discrete: posterior and prior differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        double p = posterior.masses[i];
        if (p == 0.0) continue;
        double q = prior_masses[i];
        if (q == 0.0) return std::numeric_limits<double>::infinity();
        s += p * std::log(p / q);
    }
    return std::max(0.0, s);
}

// Risk certificate for a posterior over the class: posterior mean risk plus
// the temperature-weighted KL to the prior plus the offset.
inline double catoni_bound(const posterior_weights& posterior, const finite_predictor_space& space,
                           const catoni_params& params) {
    if (posterior.size() != space.size())
        throw std::invalid_argument("catoni_bound: posterior and space differ in length");
    double kl = kl_discrete(posterior, space.prior_masses);
    if (std::isinf(kl)) return kl;
    double mean_risk = 0.0;
    for (std::size_t i = 0; i < posterior.size(); ++i)
        mean_risk += posterior.masses[i] * space.risks[i];
    return mean_risk + params.lambda * kl + params.offset();
}

// Certificate-minimising posterior: prior reweighted by exp(-risk/lambda),
// computed in log space.
inline posterior_weights gibbs_posterior(const finite_predictor_space& space, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("gibbs_posterior: lambda must be positive");
    std::vector<double> logw(space.size(), neg_infinity);
    for (std::size_t i = 0; i < space.size(); ++i) {
        double m = space.prior_masses[i];
        if (m > 0.0) logw[i] = std::log(m) - space.risks[i] / lambda;
    }
    double norm = detail::log_sum_exp(logw);
    std::vector<double> masses(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) masses[i] = std::exp(logw[i] - norm);
    return posterior_weights(std::move(masses));
}

// Minimum certificate value over all posteriors, as a functional of the risk
// prior alone: -lambda log rho[exp(-R/lambda)] + offset.
inline double catoni_min_bound(const discrete_risk_prior& rho, const catoni_params& params) {
    std::vector<log_prob> log_masses;
    std::vector<double> values;
    log_masses.reserve(rho.size());
    values.reserve(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        log_masses.push_back(log_prob::from_linear(rho.masses[i]));
        values.push_back(-rho.atoms[i] / params.lambda);
    }
    return -params.lambda * log_expectation_exp(log_masses, values) + params.offset();
}

// Minimum certificate for a two-point risk prior with mass q at r and 1-q
// at 0, written to stay accurate when q is within rounding of 1.
inline double bmin_bernoulli(double r, double q, const catoni_params& params) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("bmin_bernoulli: r outside [0,1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("bmin_bernoulli: q outside [0,1]");
    if (q == 1.0) return r + params.offset();
    return -params.lambda * std::log1p(q * std::expm1(-r / params.lambda)) + params.offset();
}

}  // namespace pacbayes
