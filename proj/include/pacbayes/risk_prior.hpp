#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "format.hpp"
#include "numerics.hpp"

// Discrete risk priors: push-forwards of a prior over predictors through the
// empirical risk, the stochastic (CDF dominance) order, and the two-point
// reduction that keeps only mass-above-r information.

namespace pacbayes {

inline constexpr double atom_merge_tol = 1e-12;

namespace detail {

inline void check_mass_vector(const std::vector<double>& masses, const char* who) {
    if (masses.empty()) throw std::invalid_argument(std::string(who) + ": no masses");
    double total = 0.0;
    for (double m : masses) {
        if (!(m >= 0.0)) throw std::invalid_argument(std::string(who) + ": negative mass");
        total += m;
    }
    if (!(std::abs(total - 1.0) <= 1e-9))
        throw std::invalid_argument(std::string(who) + ": masses sum to " + format_double(total));
}

inline void check_risks(const std::vector<double>& risks, const char* who) {
    for (double r : risks)
        if (!(r >= 0.0 && r <= 1.0))
            throw std::invalid_argument(std::string(who) + ": risk outside [0,1]");
}

}  // namespace detail

// Finite predictor class: per-predictor empirical risk and prior mass.
struct finite_predictor_space {
    std::vector<double> risks;
    std::vector<double> prior_masses;

    finite_predictor_space(std::vector<double> risks_in, std::vector<double> masses_in)
        : risks(std::move(risks_in)), prior_masses(std::move(masses_in)) {
        if (risks.size() != prior_masses.size())
            throw std::invalid_argument("finite_predictor_space: risks and masses differ in length");
        detail::check_mass_vector(prior_masses, "finite_predictor_space");
        detail::check_risks(risks, "finite_predictor_space");
    }

    std::size_t size() const { return risks.size(); }
};

// Distribution of the risk value under the prior: increasing atoms + masses.
struct discrete_risk_prior {
    std::vector<double> atoms;
    std::vector<double> masses;

    discrete_risk_prior(std::vector<double> atoms_in, std::vector<double> masses_in)
        : atoms(std::move(atoms_in)), masses(std::move(masses_in)) {
        if (atoms.size() != masses.size())
            throw std::invalid_argument("discrete_risk_prior: atoms and masses differ in length");
        detail::check_mass_vector(masses, "discrete_risk_prior");
        detail::check_risks(atoms, "discrete_risk_prior");
        for (std::size_t i = 1; i < atoms.size(); ++i)
            if (!(atoms[i] - atoms[i - 1] > atom_merge_tol))
                throw std::invalid_argument(
                    "discrete_risk_prior: atoms must increase by more than the merge tolerance");
    }

    std::size_t size() const { return atoms.size(); }

    double mean() const {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) s += atoms[i] * masses[i];
        return s;
    }

    // Mass of [0, x] (right-continuous CDF).
    double cdf(double x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size() && atoms[i] <= x; ++i) s += masses[i];
        return s;
    }

    // Mass of [r, inf), closed lower endpoint.
    double mass_at_or_above(double r) const {
        double s = 0.0;
        for (std::size_t i = atoms.size(); i-- > 0;) {
            if (atoms[i] < r) break;
            s += masses[i];
        }
        return s;
    }

    // Mass of [0, r), open upper endpoint.
    double mass_below(double r) const {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size() && atoms[i] < r; ++i) s += masses[i];
        return s;
    }
};

// Distribution of the risk across the predictor class: equal risks (within
// the merge tolerance) pool their prior mass.
inline discrete_risk_prior pushforward(const finite_predictor_space& space) {
    std::vector<std::size_t> order(space.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return space.risks[a] < space.risks[b]; });

    std::vector<double> atoms;
    std::vector<double> masses;
    for (std::size_t idx : order) {
        double r = space.risks[idx];
        if (!atoms.empty() && r - atoms.back() <= atom_merge_tol) {
            masses.back() += space.prior_masses[idx];
        } else {
            atoms.push_back(r);
            masses.push_back(space.prior_masses[idx]);
        }
    }
    return discrete_risk_prior(std::move(atoms), std::move(masses));
}

enum class stochastic_order { less_or_equal, greater_or_equal, equal, incomparable };

inline const char* stochastic_order_label(stochastic_order rel) {
    switch (rel) {
        case stochastic_order::less_or_equal: return "LESS_OR_EQUAL";
        case stochastic_order::greater_or_equal: return "GREATER_OR_EQUAL";
        case stochastic_order::equal: return "EQUAL";
        default: return "INCOMPARABLE";
    }
}

// CDF dominance on the union of atoms: a is at most b in the stochastic
// order when a's CDF is everywhere at least b's.
inline stochastic_order stochastic_compare(const discrete_risk_prior& a,
                                           const discrete_risk_prior& b, double tol = 1e-12) {
    if (!(tol >= 0.0)) throw std::invalid_argument("stochastic_compare: negative tolerance");
    std::vector<double> points;
    points.reserve(a.size() + b.size());
    points.insert(points.end(), a.atoms.begin(), a.atoms.end());
    points.insert(points.end(), b.atoms.begin(), b.atoms.end());
    std::sort(points.begin(), points.end());

    double max_b_over_a = 0.0;  // how far b's CDF rises above a's
    double max_a_over_b = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    double fa = 0.0;
    double fb = 0.0;
    for (double x : points) {
        while (ia < a.size() && a.atoms[ia] <= x) fa += a.masses[ia++];
        while (ib < b.size() && b.atoms[ib] <= x) fb += b.masses[ib++];
        max_b_over_a = std::max(max_b_over_a, fb - fa);
        max_a_over_b = std::max(max_a_over_b, fa - fb);
    }
    bool a_le_b = max_b_over_a <= tol;
    bool b_le_a = max_a_over_b <= tol;
    if (a_le_b && b_le_a) return stochastic_order::equal;
    if (a_le_b) return stochastic_order::less_or_equal;
    if (b_le_a) return stochastic_order::greater_or_equal;
    return stochastic_order::incomparable;
}

// Two-point reduction: keep rho's mass on [r, inf) at r, send the rest to 0.
// Always stochastically below rho.
inline discrete_risk_prior bernoulli_minorant(const discrete_risk_prior& rho, double r) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("bernoulli_minorant: r outside (0,1]");
    double q = rho.mass_at_or_above(r);
    if (q <= 0.0 || r <= atom_merge_tol) return discrete_risk_prior({0.0}, {1.0});
    if (q >= 1.0) return discrete_risk_prior({r}, {1.0});
    return discrete_risk_prior({0.0, r}, {1.0 - q, q});
}

inline void write_prior_csv(std::ostream& out, const discrete_risk_prior& rho) {
    out << "atom,mass\n";
    for (std::size_t i = 0; i < rho.size(); ++i)
        out << format_double(rho.atoms[i]) << ',' << format_double(rho.masses[i]) << '\n';
}

// Rows are (risk, mass) pairs in any order; repeated risks are legal and
// merge on push-forward.
inline finite_predictor_space read_predictor_space_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "atom,mass")
        throw std::invalid_argument("row 0: expected header atom,mass");
    std::vector<double> risks;
    std::vector<double> masses;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::string_view body = strip_cr(line);
        if (body.empty()) continue;
        auto fields = split_csv_line(body);
        if (fields.size() != 2)
            throw std::invalid_argument("row " + std::to_string(row) + ": expected 2 fields");
        risks.push_back(parse_csv_double(fields[0], row, "atom"));
        masses.push_back(parse_csv_double(fields[1], row, "mass"));
    }
    return finite_predictor_space(std::move(risks), std::move(masses));
}

inline discrete_risk_prior read_prior_csv(std::istream& in) {
    return pushforward(read_predictor_space_csv(in));
}

}  // namespace pacbayes
