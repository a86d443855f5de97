#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "format.hpp"
#include "numerics.hpp"

// Prior mass that uninformed priors place on low-risk predictors, for two
// structured classes: cluster assignments with k groups of p points each,
// and permutations of k items.

namespace pacbayes {

// k groups of p points, predictor drawn uniformly; each point lands in the
// wrong group independently with probability (k-1)/k, and a predictor is
// low-risk when at most a fraction r of the k*p points are wrong.
struct cluster_model {
    std::size_t k;
    std::size_t p;
    double r;

    cluster_model(std::size_t k_in, std::size_t p_in, double r_in) : k(k_in), p(p_in), r(r_in) {
        if (k < 2) throw std::invalid_argument("cluster_model: k must be at least 2");
        if (p < 1) throw std::invalid_argument("cluster_model: p must be at least 1");
        if (!(r > 0.0 && r < 0.5)) throw std::invalid_argument("cluster_model: r outside (0,0.5)");
    }
};

// Exact log prior mass of predictors with at most floor(r*k*p) errors: each
// point is wrong with probability (k-1)/k, so errors follow a binomial with
// k*p trials and the mass is its lower tail.
inline log_prob log_mass_low_risk_exact(const cluster_model& model) {
    std::size_t trials = model.k * model.p;
    std::size_t max_errors =
        static_cast<std::size_t>(std::floor(model.r * static_cast<double>(trials)));
    double log_wrong = std::log1p(-1.0 / static_cast<double>(model.k));
    return log_binomial_tail(trials, log_prob(log_wrong), max_errors);
}

// Closed-form upper bound on the same mass. Vacuous (above 0) values clamp
// to certainty.
inline log_prob log_mass_low_risk_bound(const cluster_model& model) {
    double kp = static_cast<double>(model.k) * static_cast<double>(model.p);
    double v = std::log(model.r * kp) + model.r * kp * std::log(kp) -
               (1.0 - model.r) * kp * std::log(static_cast<double>(model.k));
    return log_prob(std::min(0.0, v));
}

// Uniform prior over permutations of k items: log mass of any single
// permutation, in particular the zero-risk one.
inline log_prob log_permutation_prior_mass(std::size_t k) {
    if (k < 2) throw std::invalid_argument("log_permutation_prior_mass: k must be at least 2");
    return log_prob(-std::lgamma(static_cast<double>(k) + 1.0));
}

struct cluster_mass_row {
    std::size_t k;
    std::size_t p;
    log_prob log_exact;
    log_prob log_bound;
};

inline std::vector<cluster_mass_row> sweep_cluster_masses(const std::vector<std::size_t>& k_grid,
                                                          const std::vector<std::size_t>& p_grid,
                                                          double r) {
    if (k_grid.empty() || p_grid.empty())
        throw std::invalid_argument("sweep_cluster_masses: empty grid");
    std::vector<cluster_mass_row> rows;
    rows.reserve(k_grid.size() * p_grid.size());
    for (std::size_t k : k_grid)
        for (std::size_t p : p_grid) {
            cluster_model model(k, p, r);
            rows.push_back({k, p, log_mass_low_risk_exact(model), log_mass_low_risk_bound(model)});
        }
    return rows;
}

inline void write_cluster_masses_csv(std::ostream& out,
                                     const std::vector<cluster_mass_row>& rows) {
    constexpr double ln10 = 2.302585092994046;
    out << "k,p,log10_exact,log10_bound\n";
    for (const cluster_mass_row& row : rows)
        out << row.k << ',' << row.p << ',' << format_double(row.log_exact.value / ln10) << ','
            << format_double(row.log_bound.value / ln10) << '\n';
}

}  // namespace pacbayes
