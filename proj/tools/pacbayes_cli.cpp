// Command-line front end: one subcommand per library computation, CSV/JSON
// emission, byte-deterministic output for fixed inputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <pacbayes/catoni.hpp>
#include <pacbayes/coverage.hpp>
#include <pacbayes/format.hpp>
#include <pacbayes/quantile.hpp>
#include <pacbayes/risk_prior.hpp>
#include <pacbayes/test_bound.hpp>
#include <pacbayes/uninformed_prior.hpp>

namespace {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative output paths land under PACBAYES_OUTPUT_DIR when it is set.
std::filesystem::path resolve_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative())
        if (const char* dir = std::getenv("PACBAYES_OUTPUT_DIR")) p = std::filesystem::path(dir) / p;
    return p;
}

template <class Fn>
void emit(const std::string& out, Fn&& write) {
    if (out.empty()) {
        write(std::cout);
        return;
    }
    std::filesystem::path p = resolve_out(out);
    std::ofstream f(p);
    if (!f) throw io_error("cannot open output file: " + p.string());
    write(f);
    f.flush();
    if (!f) throw io_error("failed writing output file: " + p.string());
}

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open input file: " + path);
    return f;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0)) throw std::invalid_argument("grid: lower end must be positive");
    if (!(hi > lo)) throw std::invalid_argument("grid: upper end must exceed lower end");
    if (points < 2) throw std::invalid_argument("grid: need at least 2 points");
    double log_lo = std::log(lo);
    double log_hi = std::log(hi);
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(points - 1);
        grid[i] = std::exp(log_lo + t * (log_hi - log_lo));
    }
    grid.back() = hi;
    return grid;
}

std::vector<std::size_t> count_range(std::size_t lo, std::size_t hi, const char* who) {
    if (hi < lo) throw std::invalid_argument(std::string(who) + ": max below min");
    std::vector<std::size_t> grid;
    grid.reserve(hi - lo + 1);
    for (std::size_t v = lo; v <= hi; ++v) grid.push_back(v);
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pacbayes;

    CLI::App app{
        "Risk certificates for randomized predictors: certificate evaluation,\n"
        "prior-mass requirements, test-set baselines and coverage checks."};
    app.require_subcommand(1);

    // Running-scenario defaults shared by the guarantee subcommands.
    double G = 0.015;
    std::size_t n = 60000;
    double delta = 0.035;
    double lambda = 0.0;
    double r = 0.0;
    double alpha = 0.1;
    std::string in_path;
    std::string out_path;

    auto add_target_flags = [&](CLI::App* sub) {
        sub->add_option("--G", G, "target guarantee")->capture_default_str();
        sub->add_option("--n", n, "sample size")->capture_default_str();
        sub->add_option("--delta", delta, "failure budget")->capture_default_str();
    };

    CLI::App* bound = app.add_subcommand(
        "bound", "minimum certificate value for a risk prior CSV (atom,mass)");
    bound->add_option("--prior", in_path, "risk prior CSV")->required();
    bound->add_option("--lambda", lambda, "temperature")->required();
    bound->add_option("--n", n, "sample size")->capture_default_str();
    bound->add_option("--delta", delta, "failure budget")->capture_default_str();
    bound->callback([&] {
        std::ifstream f = open_input(in_path);
        discrete_risk_prior rho = read_prior_csv(f);
        std::cout << format_double(catoni_min_bound(rho, catoni_params(n, delta, lambda))) << '\n';
    });

    CLI::App* gibbs = app.add_subcommand(
        "gibbs", "certificate-minimising posterior for a predictor space CSV (atom,mass)");
    gibbs->add_option("--space", in_path, "predictor space CSV")->required();
    gibbs->add_option("--lambda", lambda, "temperature")->required();
    gibbs->add_option("--out", out_path, "output CSV (default stdout)");
    gibbs->callback([&] {
        std::ifstream f = open_input(in_path);
        finite_predictor_space space = read_predictor_space_csv(f);
        posterior_weights posterior = gibbs_posterior(space, lambda);
        emit(out_path, [&](std::ostream& out) {
            out << "risk,mass\n";
            for (std::size_t i = 0; i < space.size(); ++i)
                out << format_double(space.risks[i]) << ',' << format_double(posterior.masses[i])
                    << '\n';
        });
    });

    CLI::App* quantile = app.add_subcommand(
        "quantile", "prior mass below risk r needed to certify the target guarantee");
    quantile->add_option("--r", r, "risk level")->required();
    add_target_flags(quantile);
    quantile->add_option("--lambda", lambda,
                         "temperature (omit to optimise the temperature away)");
    quantile->callback([&] {
        target_spec target(G, n, delta);
        if (quantile->count("--lambda") > 0) {
            double qbar = qbar_cat_lambda(r, target, lambda);
            std::cout << "r=" << format_double(r) << '\n'
                      << "qbar=" << format_double(qbar) << '\n'
                      << "lambda=" << format_double(lambda) << '\n';
        } else {
            requirement_point point = qbar_cat_temperature_free(r, target);
            std::cout << "r=" << format_double(point.r) << '\n'
                      << "qbar=" << format_double(point.qbar) << '\n'
                      << "lambda=min\n";
        }
    });

    CLI::App* window = app.add_subcommand(
        "window", "feasible temperature window and the zero-requirement risk threshold");
    add_target_flags(window);
    window->callback([&] {
        temperature_window w = solve_temperature_window(target_spec(G, n, delta));
        std::cout << "lambda_min=" << format_double(w.lambda_min) << '\n'
                  << "lambda_max=" << format_double(w.lambda_max) << '\n'
                  << "lambda_opt=" << format_double(w.lambda_opt) << '\n'
                  << "r_thresh=" << format_double(w.r_thresh) << '\n';
    });

    CLI::App* theorem3 = app.add_subcommand(
        "theorem3", "low-risk prior mass any certifying method must provide");
    add_target_flags(theorem3);
    theorem3->add_option("--alpha", alpha, "split parameter in (0,1)")->capture_default_str();
    theorem3->callback([&] {
        requirement_point point = necessary_prior_mass(target_spec(G, n, delta), alpha);
        std::cout << "r_alpha=" << format_double(point.r) << '\n'
                  << "q_alpha=" << format_double(point.qbar) << '\n';
    });

    CLI::App* testbound = app.add_subcommand(
        "testbound", "held-out test risk bound from an empirical mean");
    double mean = 0.0;
    std::size_t n_valid = 0;
    testbound->add_option("--mean", mean, "observed test mean")->required();
    testbound->add_option("--n", n_valid, "test sample size")->required();
    testbound->add_option("--delta", delta, "failure budget")->capture_default_str();
    testbound->callback(
        [&] { std::cout << format_double(invert_test_bound(mean, n_valid, delta)) << '\n'; });

    CLI::App* table2 = app.add_subcommand(
        "table2", "compare supplied certificates against held-out test bounds");
    double tie_tol = 5e-5;
    table2->add_option("--input", in_path, "records CSV (default: shipped benchmark rows)");
    table2->add_option("--delta", delta, "failure budget")->capture_default_str();
    table2->add_option("--tie-tol", tie_tol, "winner tie tolerance")->capture_default_str();
    table2->add_option("--out", out_path, "output CSV (default stdout)");
    table2->callback([&] {
        std::vector<experiment_record> records;
        if (table2->count("--input") > 0) {
            std::ifstream f = open_input(in_path);
            records = parse_records(f);
        } else {
            records = parse_records(std::string(table2_fixture_csv()));
        }
        auto comparisons = compare_records(records, delta, tie_tol);
        emit(out_path, [&](std::ostream& out) { write_comparisons_csv(out, comparisons); });
    });

    double r_min = 0.001;
    double r_max = 1.0;
    std::size_t r_points = 200;
    auto add_r_grid_flags = [&](CLI::App* sub) {
        sub->add_option("--r-min", r_min, "risk grid lower end")->capture_default_str();
        sub->add_option("--r-max", r_max, "risk grid upper end")->capture_default_str();
        sub->add_option("--r-points", r_points, "risk grid size")->capture_default_str();
    };

    CLI::App* figure1 = app.add_subcommand(
        "figure1",
        "requirement curve at the optimal temperature plus the temperature-free envelope");
    add_target_flags(figure1);
    add_r_grid_flags(figure1);
    figure1->add_option("--out", out_path, "output CSV (default stdout)");
    figure1->callback([&] {
        target_spec target(G, n, delta);
        temperature_window w = solve_temperature_window(target);
        requirement_sweep sweep = sweep_requirement_curve(
            target, log_spaced(r_min, r_max, r_points), {w.lambda_opt});
        emit(out_path, [&](std::ostream& out) { write_requirement_sweep_csv(out, sweep); });
    });

    CLI::App* figure2 = app.add_subcommand(
        "figure2", "requirement curves across the feasible temperature window");
    std::size_t temperatures = 40;
    add_target_flags(figure2);
    add_r_grid_flags(figure2);
    figure2->add_option("--temperatures", temperatures, "number of temperatures")
        ->capture_default_str();
    figure2->add_option("--out", out_path, "output CSV (default stdout)");
    figure2->callback([&] {
        target_spec target(G, n, delta);
        requirement_sweep sweep =
            sweep_requirement_curve(target, log_spaced(r_min, r_max, r_points),
                                    window_log_spaced_lambdas(target, temperatures));
        emit(out_path, [&](std::ostream& out) { write_requirement_sweep_csv(out, sweep); });
    });

    CLI::App* figure3 = app.add_subcommand(
        "figure3", "low-risk prior mass of uninformed cluster priors, exact and bounded");
    std::size_t k_min = 2, k_max = 10, p_min = 1, p_max = 40;
    double cluster_r = 0.015;
    figure3->add_option("--r", cluster_r, "low-risk level")->capture_default_str();
    figure3->add_option("--k-min", k_min, "smallest group count")->capture_default_str();
    figure3->add_option("--k-max", k_max, "largest group count")->capture_default_str();
    figure3->add_option("--p-min", p_min, "smallest points per group")->capture_default_str();
    figure3->add_option("--p-max", p_max, "largest points per group")->capture_default_str();
    figure3->add_option("--out", out_path, "output CSV (default stdout)");
    figure3->callback([&] {
        auto rows = sweep_cluster_masses(count_range(k_min, k_max, "figure3 k grid"),
                                         count_range(p_min, p_max, "figure3 p grid"), cluster_r);
        emit(out_path, [&](std::ostream& out) { write_cluster_masses_csv(out, rows); });
    });

    CLI::App* coverage = app.add_subcommand(
        "coverage", "Monte-Carlo certificate coverage for a synthetic scenario");
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    coverage->add_option("--scenario", in_path, "scenario CSV")->required();
    coverage->add_option("--trials", trials, "override the scenario's trial count");
    coverage->add_option("--seed", seed, "override the scenario's seed");
    coverage->add_option("--out", out_path, "output JSON (default stdout)");
    coverage->callback([&] {
        std::ifstream f = open_input(in_path);
        coverage_scenario scenario = read_coverage_scenario(f);
        if (coverage->count("--trials") > 0) scenario.trials = trials;
        if (coverage->count("--seed") > 0) scenario.seed = seed;
        coverage_report report = run_coverage(scenario.world, scenario.n, scenario.lambda,
                                              scenario.delta, scenario.trials, scenario.seed);
        emit(out_path, [&](std::ostream& out) { write_coverage_report_json(out, report); });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const unreachable_target& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
