#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "catoni.hpp"
#include "format.hpp"
#include "numerics.hpp"

// Prior-mass requirements: how much prior mass must sit below an empirical
// risk r so that the minimum certificate reaches a target guarantee G, per
// temperature and after optimising the temperature away.

namespace pacbayes {

// Raised when no temperature can certify the requested guarantee.
struct unreachable_target : std::domain_error {
    using std::domain_error::domain_error;
};

// Target guarantee G with sample size n and failure budget delta.
struct target_spec {
    double G;
    std::size_t n;
    double delta;

    target_spec(double G_in, std::size_t n_in, double delta_in)
        : G(G_in), n(n_in), delta(delta_in) {
        if (!(G > 0.0 && G < 1.0)) throw std::invalid_argument("target_spec: G outside (0,1)");
        if (n < 1) throw std::invalid_argument("target_spec: n must be at least 1");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("target_spec: delta outside (0,1)");
    }

    // Smallest certifiable guarantee: even a point mass at risk 0 cannot be
    // certified below this level.
    double reachability_threshold() const {
        return std::sqrt(-std::log(delta) / (2.0 * static_cast<double>(n)));
    }

    bool reachable() const { return G >= reachability_threshold(); }
};

// Temperatures at which the offset alone stays below G, plus the risk level
// below which a point mass certifies G outright.
struct temperature_window {
    double lambda_min;
    double lambda_max;
    double lambda_opt;
    double r_thresh;

    double lambda_thresh() const { return std::sqrt(lambda_min * lambda_max); }
};

struct requirement_point {
    double r;
    double qbar;
};

namespace detail {

// log of exp(-G/lambda + 1/(8 n lambda^2)) / delta.
inline double log_saturation(double lambda, const target_spec& target) {
    double nn = static_cast<double>(target.n);
    return -target.G / lambda + 1.0 / (8.0 * nn * lambda * lambda) - std::log(target.delta);
}

}  // namespace detail

// exp of the log-saturation, capped at 1. Equals 1 exactly when lambda lies
// outside the feasible temperature window.
inline double saturation_factor(double lambda, const target_spec& target) {
    if (!(lambda > 0.0)) throw std::invalid_argument("saturation_factor: lambda must be positive");
    double log_e = detail::log_saturation(lambda, target);
    return log_e >= 0.0 ? 1.0 : std::exp(log_e);
}

// Least prior mass strictly below risk r needed to certify G at temperature
// lambda, from the two-point reduction. 1 means the temperature cannot
// certify G at all, 0 means no low-risk mass is needed.
inline double qbar_cat_lambda(double r, const target_spec& target, double lambda) {
    if (!(r > 0.0)) throw std::invalid_argument("qbar_cat_lambda: r must be positive");
    if (!(lambda > 0.0)) throw std::invalid_argument("qbar_cat_lambda: lambda must be positive");
    double log_e = detail::log_saturation(lambda, target);
    if (log_e >= 0.0) return 1.0;
    double e = std::exp(log_e);
    double y = std::exp(-r / lambda);
    if (e <= y) return 0.0;
    double q = (e - y) / (-std::expm1(-r / lambda));
    return std::clamp(q, 0.0, 1.0);
}

// Temperatures with saturation below 1, from the quadratic in 1/lambda.
inline temperature_window solve_temperature_window(const target_spec& target) {
    if (!target.reachable())
        throw unreachable_target(
            "target guarantee below sqrt(-log(delta)/(2n)); no temperature satisfies it");
    double nn = static_cast<double>(target.n);
    double log_delta = std::log(target.delta);
    double disc = std::max(0.0, target.G * target.G + log_delta / (2.0 * nn));
    double root = std::sqrt(disc);
    double beta_hi = 4.0 * nn * (target.G + root);
    double beta_lo = 4.0 * nn * (target.G - root);
    temperature_window w{};
    w.lambda_min = 1.0 / beta_hi;
    w.lambda_max = beta_lo > 0.0 ? 1.0 / beta_lo : std::numeric_limits<double>::infinity();
    w.lambda_opt = 1.0 / (4.0 * nn * target.G);
    w.r_thresh = target.G - 2.0 * std::sqrt(-log_delta / (8.0 * nn));
    return w;
}

// Mass requirement in the flat large-r regime, at the best temperature.
inline double qbar_max_asymptotic(const target_spec& target) {
    double nn = static_cast<double>(target.n);
    double log_q = -2.0 * target.G * target.G * nn - std::log(target.delta);
    return log_q >= 0.0 ? 1.0 : std::exp(log_q);
}

// Mass requirement with the temperature optimised away: zero at or below
// r_thresh, otherwise the minimum of qbar_cat_lambda over a widened window.
inline requirement_point qbar_cat_temperature_free(double r, const target_spec& target,
                                                   std::size_t grid = 512, double tol = 1e-10) {
    if (!(r > 0.0))
        throw std::invalid_argument("qbar_cat_temperature_free: r must be positive");
    temperature_window w = solve_temperature_window(target);
    if (r <= w.r_thresh) return {r, 0.0};
    double hi = std::isinf(w.lambda_max) ? w.lambda_min * 1e6 : w.lambda_max * 10.0;
    scalar_minimum best = minimize_scalar(
        [&](double lambda) { return qbar_cat_lambda(r, target, lambda); }, w.lambda_min / 10.0, hi,
        grid, tol);
    return {r, std::clamp(best.min, 0.0, 1.0)};
}

// Prior mass any method must place on low-risk predictors to certify G:
// a requirement at risk level G/(1-alpha) with mass alpha * qbar_max.
inline requirement_point necessary_prior_mass(const target_spec& target, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("necessary_prior_mass: alpha outside (0,1)");
    if (!target.reachable()) return {0.0, 1.0};
    double nn = static_cast<double>(target.n);
    double log_q =
        std::log(alpha) - 2.0 * target.G * target.G * nn - std::log(target.delta);
    return {target.G / (1.0 - alpha), log_q >= 0.0 ? 1.0 : std::exp(log_q)};
}

// count temperatures, log-spaced across the feasible window.
inline std::vector<double> window_log_spaced_lambdas(const target_spec& target,
                                                     std::size_t count) {
    if (count < 2)
        throw std::invalid_argument("window_log_spaced_lambdas: need at least 2 temperatures");
    temperature_window w = solve_temperature_window(target);
    double hi = std::isinf(w.lambda_max) ? w.lambda_min * 1e6 : w.lambda_max;
    double log_lo = std::log(w.lambda_min);
    double log_hi = std::log(hi);
    std::vector<double> lambdas(count);
    for (std::size_t i = 0; i < count; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(count - 1);
        lambdas[i] = std::exp(log_lo + t * (log_hi - log_lo));
    }
    return lambdas;
}

struct requirement_curve_point {
    double r;
    std::vector<double> qbar_per_lambda;
    double qbar_temperature_free;
};

struct requirement_sweep {
    std::vector<double> lambdas;
    std::vector<requirement_curve_point> points;
};

// Requirement curves over an increasing positive r grid, one per
// temperature plus the temperature-free envelope. Empty lambdas means 40
// log-spaced temperatures across the feasible window.
inline requirement_sweep sweep_requirement_curve(const target_spec& target,
                                                 const std::vector<double>& r_grid,
                                                 std::vector<double> lambdas = {}) {
    if (r_grid.empty()) throw std::invalid_argument("sweep_requirement_curve: empty r grid");
    if (!(r_grid.front() > 0.0))
        throw std::invalid_argument("sweep_requirement_curve: r grid must be positive");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (!(r_grid[i] > r_grid[i - 1]))
            throw std::invalid_argument("sweep_requirement_curve: r grid must increase");
    if (lambdas.empty()) {
        lambdas = window_log_spaced_lambdas(target, 40);
    } else {
        for (double lambda : lambdas)
            if (!(lambda > 0.0))
                throw std::invalid_argument("sweep_requirement_curve: lambda must be positive");
    }

    requirement_sweep sweep;
    sweep.lambdas = std::move(lambdas);
    sweep.points.reserve(r_grid.size());
    for (double r : r_grid) {
        requirement_curve_point point;
        point.r = r;
        point.qbar_per_lambda.reserve(sweep.lambdas.size());
        for (double lambda : sweep.lambdas)
            point.qbar_per_lambda.push_back(qbar_cat_lambda(r, target, lambda));
        point.qbar_temperature_free = qbar_cat_temperature_free(r, target).qbar;
        sweep.points.push_back(std::move(point));
    }
    return sweep;
}

// Long format: one row per (r, lambda), then a row per r with lambda "min"
// holding the temperature-free envelope.
inline void write_requirement_sweep_csv(std::ostream& out, const requirement_sweep& sweep) {
    out << "r,lambda,qbar\n";
    for (const requirement_curve_point& point : sweep.points) {
        for (std::size_t i = 0; i < sweep.lambdas.size(); ++i)
            out << format_double(point.r) << ',' << format_double(sweep.lambdas[i]) << ','
                << format_double(point.qbar_per_lambda[i]) << '\n';
        out << format_double(point.r) << ",min," << format_double(point.qbar_temperature_free)
            << '\n';
    }
}

}  // namespace pacbayes
