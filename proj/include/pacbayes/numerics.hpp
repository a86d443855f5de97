#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Log-space scalar primitives shared by the bound, requirement and prior-mass
// code: stable aggregation, binary relative entropy, bracketed root finding,
// scalar minimization and binomial tails.

namespace pacbayes {

inline constexpr double neg_infinity = -std::numeric_limits<double>::infinity();

// Probability carried on the natural-log scale. Stays meaningful far below
// the linear double range; -inf encodes probability zero.
struct log_prob {
    double value;

    log_prob() : value(neg_infinity) {}

    explicit log_prob(double log_value) : value(log_value) {
        if (std::isnan(log_value)) throw std::domain_error("log_prob: NaN");
        if (log_value > 0.0) {
            if (log_value > 1e-9)
                throw std::domain_error("log_prob: positive log value " + std::to_string(log_value));
            value = 0.0;  // aggregation rounding slack
        }
    }

    static log_prob from_linear(double p) {
        if (!(p >= 0.0 && p <= 1.0 + 1e-9))
            throw std::domain_error("log_prob: probability outside [0,1]");
        return log_prob(std::log(std::min(p, 1.0)));
    }

    // May underflow to 0 below e^-745; presentation use only.
    double to_linear() const { return std::exp(value); }
};

namespace detail {

// log(sum_i exp(t_i)) with the max shift; no normalization requirement.
inline double log_sum_exp(const std::vector<double>& terms) {
    double m = neg_infinity;
    for (double t : terms) m = std::max(m, t);
    if (m == neg_infinity) return neg_infinity;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

// log(1 - e^x) for x <= 0.
inline double log1m_exp(double x) {
    if (x >= 0.0) return neg_infinity;
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

}  // namespace detail

// log of the expectation of e^exponent under the given probability masses.
inline double log_expectation_exp(const std::vector<log_prob>& log_masses,
                                  const std::vector<double>& exponents) {
    if (log_masses.empty()) throw std::invalid_argument("log_expectation_exp: empty input");
    if (log_masses.size() != exponents.size())
        throw std::invalid_argument("log_expectation_exp: length mismatch");
    std::vector<double> terms(log_masses.size());
    for (std::size_t i = 0; i < log_masses.size(); ++i) terms[i] = log_masses[i].value;
    double total = detail::log_sum_exp(terms);
    if (!(std::abs(std::expm1(total)) <= 1e-9))
        throw std::invalid_argument("log_expectation_exp: masses do not sum to 1");
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] += exponents[i];
    return detail::log_sum_exp(terms);
}

// Binary relative entropy p log(p/q) + (1-p) log((1-p)/(1-q)) in nats,
// with the 0 log 0 = 0 convention.
inline double kl_bernoulli(double p, double q, bool allow_infinite = false) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("kl_bernoulli: p outside [0,1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("kl_bernoulli: q outside [0,1]");
    if ((q == 0.0 && p > 0.0) || (q == 1.0 && p < 1.0)) {
        if (allow_infinite) return std::numeric_limits<double>::infinity();
        throw std::domain_error("kl_bernoulli: infinite divergence, q at the boundary");
    }
    double s = 0.0;
    if (p > 0.0) s += p * std::log(p / q);
    if (p < 1.0) s += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    return std::max(0.0, s);
}

// Root of f(x) = target on [lo, hi] for monotone f; interval bisection down
// to the given argument tolerance.
template <class Func>
double bisect_monotone(Func&& f, double lo, double hi, double target, double tol = 1e-12) {
    if (!(lo < hi)) throw std::invalid_argument("bisect_monotone: empty bracket");
    if (!(tol > 0.0)) throw std::invalid_argument("bisect_monotone: tolerance must be positive");
    double flo = f(lo);
    double fhi = f(hi);
    bool increasing = fhi >= flo;
    if (target < std::min(flo, fhi) || target > std::max(flo, fhi))
        throw std::invalid_argument("bisect_monotone: target not bracketed");
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        bool below = increasing ? fmid < target : fmid > target;
        if (below)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct scalar_minimum {
    double argmin;
    double min;
};

// Coarse grid scan (log-spaced when the bracket is positive) followed by
// golden-section refinement around the best cell.
template <class Func>
scalar_minimum minimize_scalar(Func&& f, double lo, double hi, std::size_t grid = 512,
                               double tol = 1e-10) {
    if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: empty bracket");
    if (grid < 3) throw std::invalid_argument("minimize_scalar: grid needs at least 3 points");

    bool log_spaced = lo > 0.0;
    double a = log_spaced ? std::log(lo) : lo;
    double b = log_spaced ? std::log(hi) : hi;
    auto point = [&](std::size_t i) {
        double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid - 1);
        return log_spaced ? std::exp(t) : t;
    };

    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid; ++i) {
        double v = f(point(i));
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    double best_point = point(best);

    double left = point(best == 0 ? 0 : best - 1);
    double right = point(best + 1 >= grid ? grid - 1 : best + 1);
    const double inv_phi = 0.6180339887498949;
    double x1 = right - inv_phi * (right - left);
    double x2 = left + inv_phi * (right - left);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int iter = 0; iter < 200 && right - left > tol; ++iter) {
        if (f1 <= f2) {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - inv_phi * (right - left);
            f1 = f(x1);
        } else {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + inv_phi * (right - left);
            f2 = f(x2);
        }
    }
    double mid = 0.5 * (left + right);
    scalar_minimum out{mid, f(mid)};
    if (f1 < out.min) out = {x1, f1};
    if (f2 < out.min) out = {x2, f2};
    if (best_value < out.min) out = {best_point, best_value};
    return out;
}

// log P(X <= max_successes) for X ~ Binomial(trials, p), entirely in log
// space via log-gamma terms; exact down to tails far below double range.
inline log_prob log_binomial_tail(std::size_t trials, log_prob log_p_success,
                                  std::size_t max_successes) {
    if (max_successes > trials)
        throw std::invalid_argument("log_binomial_tail: max_successes beyond trials");
    if (max_successes == trials) return log_prob(0.0);

    double lp = log_p_success.value;
    if (lp == neg_infinity) return log_prob(0.0);  // p = 0: all mass at zero successes
    double l1mp = detail::log1m_exp(lp);
    if (l1mp == neg_infinity) return log_prob(neg_infinity);  // p = 1, truncated tail is empty

    double n = static_cast<double>(trials);
    double lgn = std::lgamma(n + 1.0);
    std::vector<double> terms(max_successes + 1);
    for (std::size_t i = 0; i <= max_successes; ++i) {
        double di = static_cast<double>(i);
        terms[i] = lgn - std::lgamma(di + 1.0) - std::lgamma(n - di + 1.0) + di * lp + (n - di) * l1mp;
    }
    return log_prob(std::min(0.0, detail::log_sum_exp(terms)));
}

}  // namespace pacbayes
