#include "reflev/run.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "reflev/cpd_sim.hpp"
#include "reflev/cramer_root.hpp"
#include "reflev/errors.hpp"
#include "reflev/report.hpp"
#include "reflev/stat_kit.hpp"
#include "reflev/walk_engine.hpp"

namespace reflev {

namespace {

struct CommandOutput {
    Json results;
    CsvTable csv;
};

std::string fmt(double v) { return format_double(v); }

Json entry_cf(double value) {
    return result_entry(value, 0.0, EstimateMethod::ClosedForm);
}

Json entry_mc(double value, double stderr_) {
    return result_entry(value, stderr_, EstimateMethod::MonteCarlo);
}

std::vector<double> default_grid(const ModelSpec& model) {
    std::vector<double> grid;
    const double d = model.lattice_span();
    if (d > 0.0) {
        for (int k = 1; k <= 8; ++k) grid.push_back(d * k);
    } else {
        for (double x = 1.0; x <= 8.0 + 1e-12; x += 0.5) grid.push_back(x);
    }
    return grid;
}

CommandOutput cmd_gamma(const RunConfig& config, const ModelSpec& model) {
    const CramerRoot root = solve_gamma(model, config.tol);
    CommandOutput out;
    out.results["gamma"] = entry_cf(root.gamma);
    out.results["residual"] = entry_cf(root.residual);
    out.results["iterations"] = entry_cf(root.iterations);
    out.results["notes"] = Json{{"bracket_lo", root.bracket_lo},
                                {"bracket_hi", root.bracket_hi},
                                {"model", model.describe()}};
    out.csv.header = {"gamma", "residual", "iterations"};
    out.csv.rows = {{fmt(root.gamma), fmt(root.residual), std::to_string(root.iterations)}};
    return out;
}

void append_quantity_row(CsvTable& csv, const std::string& name, const Json& entry) {
    csv.rows.push_back({name, entry["value"].dump(), entry["stderr"].dump(),
                        entry["method"].get<std::string>()});
}

CommandOutput cmd_constants(const RunConfig& config, const ModelSpec& model) {
    const CramerRoot root = solve_gamma(model, config.tol);
    CommandOutput out;
    out.csv.header = {"quantity", "value", "stderr", "method"};
    out.results["gamma"] = entry_cf(root.gamma);

    if (model.is_walk()) {
        Stream stream(config.seed);
        const RwConstants rw = rw_constants(model, root.gamma, config.budget,
                                            stream.child("constants"), config.workers);
        out.results["C"] = result_entry(rw.C);
        out.results["K"] = result_entry(rw.K);
        out.results["alpha"] = result_entry(rw.alpha);
        out.results["ladder_transform"] = result_entry(rw.ladder_transform);
        out.results["notes"] =
            Json{{"span", rw.span},
                 {"lattice_corrected", rw.lattice_corrected},
                 {"censored_fraction", rw.censored_fraction},
                 {"model", model.describe()}};
    } else {
        const LevyConstants lc = levy_constants(model, root.gamma);
        out.results["beta"] = entry_cf(lc.beta);
        out.results["m"] = entry_cf(lc.m);
        out.results["phi_at_gamma"] = entry_cf(lc.phi_at_gamma);
        out.results["C_star"] = entry_cf(lc.C_star);
        out.results["K_star"] = entry_cf(lc.K_star);
        out.results["alpha_star"] = entry_cf(lc.alpha_star);
        out.results["notes"] = Json{{"normalization", lc.normalization},
                                    {"pair_is_canonical", lc.pair_is_canonical},
                                    {"model", model.describe()}};
    }
    for (const auto& [name, value] : out.results.items()) {
        if (name == "notes") continue;
        append_quantity_row(out.csv, name, value);
    }
    return out;
}

CommandOutput cmd_identity_check(const RunConfig& config, const ModelSpec& model) {
    const double residual = iglehart_identity_check(model, config.k_max);
    CommandOutput out;
    out.results["max_residual"] = entry_cf(residual);
    out.results["notes"] = Json{{"k_max", config.k_max}, {"model", model.describe()}};
    out.csv.header = {"k_max", "max_residual"};
    out.csv.rows = {{std::to_string(config.k_max), fmt(residual)}};
    return out;
}

CommandOutput cmd_simulate(const RunConfig& config, const ModelSpec& model) {
    CommandOutput out;
    Stream stream(config.seed);
    Stream sub = stream.child("simulate");
    if (model.is_walk()) {
        const auto n = static_cast<std::size_t>(config.horizon);
        const std::vector<double> steps = model.sample(sub, n);
        const PathSummary path = reflect_and_summarize(steps);
        const ExcursionDecomposition dec = decompose_excursions(steps);
        out.results["n"] = entry_cf(static_cast<double>(n));
        out.results["max_segmental_score"] = entry_mc(path.max_segmental_score, 0.0);
        out.results["complete_excursions"] =
            entry_mc(static_cast<double>(dec.complete.size()), 0.0);
        out.results["final_sum"] = entry_mc(path.partial_sums.back(), 0.0);
        out.results["final_min"] = entry_mc(path.running_min.back(), 0.0);
        out.results["notes"] = Json{{"model", model.describe()}};
        out.csv.header = {"k", "step", "S", "I", "R"};
        out.csv.rows.reserve(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            out.csv.rows.push_back({std::to_string(k), k == 0 ? "0" : fmt(steps[k - 1]),
                                    fmt(path.partial_sums[k]), fmt(path.running_min[k]),
                                    fmt(path.reflected[k])});
        }
    } else if (model.kind() == ModelKind::CompoundPoissonDrift) {
        const CpdEvents events = simulate_events(model, config.horizon, sub);
        const EventPath path = reflect_exact(events, model, config.horizon);
        out.results["n_jumps"] = entry_mc(static_cast<double>(events.times.size()), 0.0);
        out.results["n_excursions"] =
            entry_mc(static_cast<double>(path.excursions.size()), 0.0);
        out.results["local_time"] = entry_mc(path.local_time, 0.0);
        out.results["time_at_minimum"] = entry_mc(path.time_at_minimum, 0.0);
        Json jumps = Json::array();
        for (std::size_t i = 0; i < events.times.size(); ++i)
            jumps.push_back(Json::array({events.times[i], events.sizes[i]}));
        out.results["notes"] =
            Json{{"model", model.describe()}, {"horizon", config.horizon}, {"jumps", jumps}};
        out.csv.header = {"start", "end", "height", "complete"};
        for (const auto& e : path.excursions)
            out.csv.rows.push_back(
                {fmt(e.start), fmt(e.end), fmt(e.height), e.complete ? "1" : "0"});
    } else {
        throw_error(ErrorCode::UnsupportedKind,
                    "Brownian paths are evaluated in closed form, not simulated");
    }
    return out;
}

CommandOutput cmd_tail(const RunConfig& config, const ModelSpec& model) {
    const CramerRoot root = solve_gamma(model, config.tol);
    const std::vector<double> grid =
        config.x_grid.empty() ? default_grid(model) : config.x_grid;
    CommandOutput out;
    out.csv.header = {"x", "eta_hat", "stderr", "e_gamma_x_eta_hat"};
    out.results["gamma"] = entry_cf(root.gamma);

    if (model.kind() == ModelKind::CompoundPoissonDrift) {
        Stream stream(config.seed);
        const EtaTailEstimate est =
            eta_tail_estimate(model, root.gamma, grid, config.horizon, config.batches,
                              stream.child("tail"), config.workers);
        Json rows = Json::array();
        for (const auto& pt : est.points) {
            const double scaled = std::exp(root.gamma * pt.x) * pt.eta_hat;
            out.csv.rows.push_back(
                {fmt(pt.x), fmt(pt.eta_hat), fmt(pt.stderr_), fmt(scaled)});
            rows.push_back(Json::array({pt.x, pt.eta_hat, pt.stderr_, scaled}));
        }
        out.results["eta0"] = entry_mc(est.eta0_hat, est.eta0_stderr);
        out.results["lt_over_t"] = entry_mc(est.lt_over_t_mean, est.lt_over_t_stderr);
        out.results["notes"] = Json{
            {"rows", rows},
            {"total_local_time", est.total_local_time},
            {"total_horizon", est.total_horizon},
            {"batches", est.batches},
            {"total_complete", est.total_complete},
            {"incomplete_excursions_excluded", est.incomplete_excursions},
            {"bias_note", "horizon-straddling excursions are excluded from counts; "
                          "their preceding local time remains in the denominator"},
            {"model", model.describe()}};
    } else if (model.kind() == ModelKind::BrownianDrift) {
        Json rows = Json::array();
        for (double x : grid) {
            const double eta = eta_bar_bm(root.gamma, x);
            const double scaled = std::exp(root.gamma * x) * eta;
            out.csv.rows.push_back({fmt(x), fmt(eta), "0", fmt(scaled)});
            rows.push_back(Json::array({x, eta, 0.0, scaled}));
        }
        out.results["notes"] = Json{{"rows", rows}, {"model", model.describe()}};
    } else {
        throw_error(ErrorCode::UnsupportedKind, "tail estimates are for Levy kinds");
    }
    return out;
}

CommandOutput cmd_tail_fit(const RunConfig& config, const ModelSpec& model) {
    const CramerRoot root = solve_gamma(model, config.tol);
    const std::vector<double> grid =
        config.x_grid.empty() ? default_grid(model) : config.x_grid;
    CommandOutput out;

    TailFit fit;
    std::size_t sample_size = 0;
    if (model.is_walk()) {
        Stream stream(config.seed);
        const FirstLadderSample sample =
            sample_first_ladder(model, stream.child("tailfit"), config.budget,
                                kDefaultStepCap, config.workers);
        const SurvivalCurve curve = empirical_survival(sample.excursion_max, grid);
        fit = tail_fit(curve.x, curve.survival, curve.weights);
        sample_size = sample.excursion_max.size();
    } else if (model.kind() == ModelKind::CompoundPoissonDrift) {
        Stream stream(config.seed);
        const EtaTailEstimate est =
            eta_tail_estimate(model, root.gamma, grid, config.horizon, config.batches,
                              stream.child("tail"), config.workers);
        std::vector<double> xs, etas, weights;
        for (const auto& pt : est.points) {
            // eta is a rate; points at or above 1 sit below the asymptotic
            // regime and outside the survival-shaped fit contract
            if (pt.eta_hat <= 0.0 || pt.eta_hat >= 1.0 || pt.stderr_ <= 0.0) continue;
            xs.push_back(pt.x);
            etas.push_back(pt.eta_hat);
            const double rel = pt.stderr_ / pt.eta_hat;  // var(log eta) = rel^2
            weights.push_back(1.0 / (rel * rel));
        }
        fit = tail_fit(xs, etas, weights);
        sample_size = est.total_complete;
    } else {
        std::vector<double> xs = grid, etas, weights;
        for (double x : grid) {
            etas.push_back(eta_bar_bm(root.gamma, x));
            weights.push_back(1.0);
        }
        fit = tail_fit(xs, etas, weights);
    }

    const double k_hat = std::exp(fit.intercept);
    out.results["slope"] = entry_mc(fit.slope, fit.slope_stderr);
    out.results["intercept"] = entry_mc(fit.intercept, fit.intercept_stderr);
    out.results["k_hat"] = entry_mc(k_hat, k_hat * fit.intercept_stderr);
    out.results["gamma"] = entry_cf(root.gamma);
    out.results["notes"] = Json{{"points_used", fit.points_used},
                                {"dropped_zero_survival", fit.dropped_zero_survival},
                                {"sample_size", sample_size},
                                {"model", model.describe()}};
    out.csv.header = {"slope", "intercept", "slope_stderr", "intercept_stderr",
                      "points_used", "k_hat"};
    out.csv.rows = {{fmt(fit.slope), fmt(fit.intercept), fmt(fit.slope_stderr),
                     fmt(fit.intercept_stderr), std::to_string(fit.points_used),
                     fmt(k_hat)}};
    return out;
}

CommandOutput cmd_poisson(const RunConfig& config, const ModelSpec& model) {
    const CramerRoot root = solve_gamma(model, config.tol);
    Stream stream(config.seed);

    if (!config.lambda && !config.y)
        throw_error(ErrorCode::ConfigError, "poisson needs --lambda or --y");
    const double lambda_target = config.lambda.value_or(0.0);
    const std::optional<double> y_override = config.y;

    PoissonFitReport report;
    if (model.is_walk()) {
        const RwConstants rw = rw_constants(model, root.gamma, config.budget,
                                            stream.child("constants"), config.workers);
        report = poisson_experiment_walk(
            model, rw, lambda_target, static_cast<std::uint64_t>(config.horizon),
            config.replications, stream.child("poisson"), y_override, config.workers);
    } else {
        const LevyConstants lc = levy_constants(model, root.gamma);
        report = poisson_experiment_levy(model, lc, lambda_target, config.horizon,
                                         config.replications, stream.child("poisson"),
                                         y_override, config.workers);
    }

    CommandOutput out;
    out.results["gamma"] = entry_cf(root.gamma);
    out.results["lambda_target"] = entry_cf(report.lambda_target);
    out.results["lambda_used"] = result_entry(
        report.lambda_used, 0.0,
        report.lambda_oracle_exact ? EstimateMethod::ClosedForm : EstimateMethod::MonteCarlo);
    out.results["y_used"] = entry_cf(report.y_used);
    out.results["mean_count"] = entry_mc(report.mean_count, report.mean_count_stderr);
    out.results["chi_square"] = entry_mc(report.gof.chi_square, 0.0);
    out.results["dof"] = entry_mc(static_cast<double>(report.gof.dof), 0.0);
    out.results["p_value"] = entry_mc(report.gof.p_value, 0.0);
    out.results["tv_distance"] = entry_mc(report.gof.tv_distance, 0.0);

    Json hist = Json::array();
    for (const auto& [value, freq] : report.histogram)
        hist.push_back(Json::array({value, freq}));
    Json notes;
    notes["replications"] = report.replications;
    notes["histogram"] = hist;
    notes["lambda_oracle_exact"] = report.lambda_oracle_exact;
    if (report.excursion_rate) {
        notes["excursion_rate"] = *report.excursion_rate;
        notes["excursion_rate_stderr"] = report.excursion_rate_stderr;
        notes["excursion_rate_target"] = report.excursion_rate_target;
    }
    notes["incomplete_excursions_excluded"] = report.incomplete_excursions;
    notes["model"] = model.describe();
    out.results["notes"] = notes;

    out.csv.header = {"replication", "count"};
    out.csv.rows.reserve(report.replication_counts.size());
    for (std::size_t i = 0; i < report.replication_counts.size(); ++i)
        out.csv.rows.push_back(
            {std::to_string(i), std::to_string(report.replication_counts[i])});
    return out;
}

CommandOutput dispatch(const RunConfig& config, const ModelSpec& model) {
    if (config.command == "gamma") return cmd_gamma(config, model);
    if (config.command == "constants") return cmd_constants(config, model);
    if (config.command == "identity-check") return cmd_identity_check(config, model);
    if (config.command == "simulate") return cmd_simulate(config, model);
    if (config.command == "tail") return cmd_tail(config, model);
    if (config.command == "tail-fit") return cmd_tail_fit(config, model);
    if (config.command == "poisson") return cmd_poisson(config, model);
    throw_error(ErrorCode::ConfigError, "unknown command: " + config.command);
}

}  // namespace

int run(const RunConfig& config) {
    try {
        validate_config(config);
        const auto t0 = std::chrono::steady_clock::now();
        const ModelSpec model = build_model(config);
        const CommandOutput out = dispatch(config, model);
        const double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (config.format == "csv") {
            write_report_text(config, render_csv(config, out.csv));
        } else {
            write_report_text(config, render_json(config, out.results, wall_ms));
        }
        return 0;
    } catch (const Error& e) {
        Json err;
        err["error"] = Json{{"code", error_code_name(e.code())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return error_exit_code(e.code());
    } catch (const std::exception& e) {
        Json err;
        err["error"] = Json{{"code", "ConfigError"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Cramer tail constants and high-excursion statistics for "
                 "reflected walks and Levy processes"};
    app.name("reflev");

    std::string command, config_path;
    std::optional<std::string> model_kind, out_path, format, x_grid_text;
    std::optional<double> p, a_up, a_down, mu, sigma, c, rho, nu, y, lambda, horizon, tol;
    std::optional<std::uint64_t> seed, budget, replications, k_max, batches;
    std::optional<int> workers;

    app.add_option("command", command,
                   "gamma|constants|identity-check|simulate|tail|tail-fit|poisson");
    app.add_option("--config", config_path, "config file; flags override its values");
    app.add_option("--model", model_kind, "twopoint|gaussian|cpd|brownian");
    app.add_option("--p", p, "TwoPointWalk up-step probability");
    app.add_option("--a-up", a_up, "TwoPointWalk up-step magnitude");
    app.add_option("--a-down", a_down, "TwoPointWalk down-step magnitude");
    app.add_option("--mu", mu, "GaussianWalk mean / BrownianDrift |drift|");
    app.add_option("--sigma", sigma, "standard deviation / diffusion coefficient");
    app.add_option("--c", c, "CompoundPoissonDrift downward drift rate");
    app.add_option("--rho", rho, "CompoundPoissonDrift jump intensity");
    app.add_option("--nu", nu, "CompoundPoissonDrift jump rate (mean 1/nu)");
    app.add_option("--seed", seed, "64-bit seed");
    app.add_option("--workers", workers, "worker threads (results are identical)");
    app.add_option("--budget", budget, "Monte Carlo replication budget");
    app.add_option("--horizon", horizon, "steps (walks) or time horizon (Levy)");
    app.add_option("--replications", replications, "experiment replications");
    app.add_option("--y", y, "excursion height threshold");
    app.add_option("--lambda", lambda, "target Poisson rate");
    app.add_option("--x-grid", x_grid_text, "grid: '1,2,3' or 'lo:hi:step'");
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_option("--format", format, "csv|json");
    app.add_option("--k-max", k_max, "identity-check depth");
    app.add_option("--batches", batches, "tail estimate batches");
    app.add_option("--tol", tol, "root solver tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "{\"error\":{\"code\":\"ConfigError\",\"message\":\""
                  << e.what() << "\"}}\n";
        return 1;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) config = parse_config_path(config_path);
        if (!command.empty()) config.command = command;
        if (model_kind) config.model_kind = *model_kind;
        if (p) config.p = p;
        if (a_up) config.a_up = a_up;
        if (a_down) config.a_down = a_down;
        if (mu) config.mu = mu;
        if (sigma) config.sigma = sigma;
        if (c) config.c = c;
        if (rho) config.rho = rho;
        if (nu) config.nu = nu;
        if (seed) config.seed = *seed;
        if (workers) config.workers = *workers;
        if (budget) config.budget = *budget;
        if (horizon) config.horizon = *horizon;
        if (replications) config.replications = *replications;
        if (y) config.y = y;
        if (lambda) config.lambda = lambda;
        if (x_grid_text) config.x_grid = parse_x_grid(*x_grid_text);
        if (out_path) config.out = *out_path;
        if (format) config.format = *format;
        if (k_max) config.k_max = *k_max;
        if (batches) config.batches = *batches;
        if (tol) config.tol = *tol;
    } catch (const Error& e) {
        Json err;
        err["error"] = Json{{"code", error_code_name(e.code())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return error_exit_code(e.code());
    }
    return run(config);
}

}  // namespace reflev
