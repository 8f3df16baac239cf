#include "reflev/stat_kit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "reflev/cpd_sim.hpp"
#include "reflev/errors.hpp"
#include "reflev/parallel.hpp"
#include "reflev/walk_engine.hpp"

namespace reflev {

TailFit tail_fit(std::span<const double> x, std::span<const double> survival,
                 std::span<const double> weights) {
    if (x.size() != survival.size() || x.size() != weights.size())
        throw_error(ErrorCode::InvalidParameter, "tail_fit inputs must have equal length");

    TailFit out;
    double S = 0.0, Sx = 0.0, Sy = 0.0, Sxx = 0.0, Sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (survival[i] <= 0.0) {
            ++out.dropped_zero_survival;
            continue;
        }
        if (survival[i] > 1.0)
            throw_error(ErrorCode::InvalidParameter, "survival values must be in (0,1]");
        if (!(weights[i] > 0.0))
            throw_error(ErrorCode::InvalidParameter, "weights must be > 0");
        const double w = weights[i];
        const double y = std::log(survival[i]);
        S += w;
        Sx += w * x[i];
        Sy += w * y;
        Sxx += w * x[i] * x[i];
        Sxy += w * x[i] * y;
        ++out.points_used;
    }
    if (out.points_used < 3)
        throw_error(ErrorCode::InsufficientData, "tail_fit needs at least 3 usable points");

    const double D = S * Sxx - Sx * Sx;
    if (!(D > 0.0))
        throw_error(ErrorCode::InsufficientData, "degenerate abscissae in tail_fit");
    out.slope = (S * Sxy - Sx * Sy) / D;
    out.intercept = (Sy * Sxx - Sx * Sxy) / D;
    out.slope_stderr = std::sqrt(S / D);
    out.intercept_stderr = std::sqrt(Sxx / D);
    return out;
}

SurvivalCurve empirical_survival(std::span<const double> sample,
                                 std::span<const double> grid) {
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    SurvivalCurve out;
    for (double g : grid) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), g);
        const double count = static_cast<double>(sorted.end() - it);
        const double s = count / n;
        if (s <= 0.0 || s >= 1.0) continue;
        out.x.push_back(g);
        out.survival.push_back(s);
        out.weights.push_back(n * s / (1.0 - s));
    }
    return out;
}

namespace {

double poisson_pmf(long k, double lambda) {
    return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

struct Cell {
    std::size_t observed = 0;
    double expected = 0.0;
    double probability = 0.0;
};

}  // namespace

GofResult poisson_gof(const std::vector<std::pair<long, std::size_t>>& histogram,
                      double lambda) {
    if (!(lambda > 0.0))
        throw_error(ErrorCode::InvalidParameter, "poisson_gof needs lambda > 0");

    std::map<long, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& [value, freq] : histogram) {
        if (value < 0)
            throw_error(ErrorCode::InvalidParameter, "counts must be >= 0");
        counts[value] += freq;
        total += freq;
    }
    if (total < 50)
        throw_error(ErrorCode::InsufficientData, "poisson_gof needs >= 50 replications");

    const double n = static_cast<double>(total);

    // Singleton cells 0..k while the open tail still expects >= 5, then one
    // open tail cell; built from the pmf alone so the binning is independent
    // of the observations.
    std::vector<Cell> cells;
    double cdf = 0.0;
    long k = 0;
    while (n * (1.0 - cdf - poisson_pmf(k, lambda)) >= 5.0) {
        Cell cell;
        cell.probability = poisson_pmf(k, lambda);
        cdf += cell.probability;
        cells.push_back(cell);
        ++k;
        if (k > 10'000'000)
            throw_error(ErrorCode::InvalidParameter, "lambda too large for binning");
    }
    Cell tail;
    tail.probability = std::max(1.0 - cdf, 0.0);
    cells.push_back(tail);
    const long tail_start = k;

    for (auto& cell : cells) cell.expected = n * cell.probability;
    for (const auto& [value, freq] : counts) {
        const std::size_t idx =
            value >= tail_start ? cells.size() - 1 : static_cast<std::size_t>(value);
        cells[idx].observed += freq;
    }

    // merge light cells into their neighbor toward the tail
    std::vector<Cell> merged;
    Cell acc;
    for (const auto& cell : cells) {
        acc.observed += cell.observed;
        acc.expected += cell.expected;
        acc.probability += cell.probability;
        if (acc.expected >= 5.0) {
            merged.push_back(acc);
            acc = Cell{};
        }
    }
    if (acc.expected > 0.0 || acc.observed > 0) {
        if (!merged.empty()) {
            merged.back().observed += acc.observed;
            merged.back().expected += acc.expected;
            merged.back().probability += acc.probability;
        } else {
            merged.push_back(acc);
        }
    }
    if (merged.size() < 2)
        throw_error(ErrorCode::DegenerateBinning, "merging left fewer than 2 cells");

    GofResult out;
    out.cells = merged.size();
    out.dof = merged.size() - 1;
    for (const auto& cell : merged) {
        const double d = static_cast<double>(cell.observed) - cell.expected;
        out.chi_square += d * d / cell.expected;
        out.tv_distance +=
            std::abs(static_cast<double>(cell.observed) / n - cell.probability);
    }
    out.tv_distance *= 0.5;
    out.p_value = boost::math::gamma_q(static_cast<double>(out.dof) / 2.0,
                                       out.chi_square / 2.0);
    return out;
}

std::pair<double, double> wilson_ci(std::size_t k, std::size_t n, double confidence) {
    if (n < 1 || k > n)
        throw_error(ErrorCode::InvalidParameter, "wilson_ci needs 0 <= k <= n, n >= 1");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw_error(ErrorCode::InvalidParameter, "confidence must be in (0,1)");
    const boost::math::normal_distribution<double> normal;
    const double z = boost::math::quantile(normal, 0.5 * (1.0 + confidence));
    const double nn = static_cast<double>(n);
    const double p_hat = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p_hat + z2 / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn)) / denom;
    double lo = center - half;
    double hi = center + half;
    if (k == 0) lo = 0.0;
    if (k == n) hi = 1.0;
    return {std::max(lo, 0.0), std::min(hi, 1.0)};
}

namespace {

PoissonFitReport finish_report(std::vector<std::size_t>& rep_counts,
                               PoissonFitReport report) {
    const double n = static_cast<double>(rep_counts.size());
    double mean = 0.0;
    for (std::size_t c : rep_counts) mean += static_cast<double>(c);
    mean /= n;
    double ss = 0.0;
    for (std::size_t c : rep_counts) {
        const double d = static_cast<double>(c) - mean;
        ss += d * d;
    }
    report.mean_count = mean;
    report.mean_count_stderr = std::sqrt(ss / ((n - 1.0) * n));

    std::map<long, std::size_t> hist;
    for (std::size_t c : rep_counts) ++hist[static_cast<long>(c)];
    report.histogram.assign(hist.begin(), hist.end());
    report.replication_counts = std::move(rep_counts);
    report.gof = poisson_gof(report.histogram, report.lambda_used);
    return report;
}

}  // namespace

PoissonFitReport poisson_experiment_walk(const ModelSpec& model,
                                         const RwConstants& constants,
                                         double lambda_target,
                                         std::uint64_t n_steps,
                                         std::size_t replications, Stream stream,
                                         std::optional<double> y_override,
                                         int workers) {
    if (!model.is_walk())
        throw_error(ErrorCode::UnsupportedKind, "walk experiment needs a walk model");
    if (replications < 500)
        throw_error(ErrorCode::InvalidParameter, "need >= 500 replications");
    if (!y_override && !(lambda_target >= 1e-4))
        throw_error(ErrorCode::InvalidParameter, "lambda_target must be >= 1e-4");

    const double gamma = constants.gamma;
    const double K = constants.K.value;
    const double alpha = constants.alpha.value;
    const double d = model.lattice_span();

    double y;
    if (y_override) {
        y = *y_override;
    } else {
        y = std::log(static_cast<double>(n_steps) * K / (alpha * lambda_target)) / gamma;
        if (d > 0.0) y = d * std::round(y / d);
        y = std::max(y, 0.0);
    }

    PoissonFitReport report;
    report.lambda_target = lambda_target;
    report.y_used = y;
    report.replications = replications;

    // exact tail oracle: skip-free lattice walk
    bool oracle = false;
    if (model.kind() == ModelKind::TwoPointWalk) {
        const auto& tp = model.two_point_params();
        if (tp.a_up == tp.a_down) {
            const std::size_t units = static_cast<std::size_t>(std::floor(y / d));
            const double tail = two_point_exact::excursion_height_geq(tp.p, units + 1);
            const double alpha_exact = tp.a_down / -model.mean();
            report.lambda_used =
                static_cast<double>(n_steps) / alpha_exact * tail;
            oracle = true;
        }
    }
    if (!oracle) report.lambda_used = lambda_target;
    report.lambda_oracle_exact = oracle;
    if (y_override && !(lambda_target > 0.0)) report.lambda_target = report.lambda_used;
    if (!(report.lambda_used >= 1e-4))
        throw_error(ErrorCode::InsufficientRate, "recomputed lambda below 1e-4");

    std::vector<std::size_t> exceed(replications, 0);
    std::vector<std::size_t> complete(replications, 0);
    parallel_for_index(replications, workers, [&](std::size_t rep) {
        Stream sub = stream.child(static_cast<std::uint64_t>(rep));
        const StreamingCounts counts =
            count_exceedances_streaming(model, n_steps, y, sub);
        exceed[rep] = counts.exceed_count;
        complete[rep] = counts.complete_count;
    });

    // strong-law side check: complete excursions per step vs 1/alpha
    {
        const double n = static_cast<double>(replications);
        double mean = 0.0;
        for (std::size_t c : complete) mean += static_cast<double>(c);
        mean /= n;
        double ss = 0.0;
        for (std::size_t c : complete) {
            const double dd = static_cast<double>(c) - mean;
            ss += dd * dd;
        }
        const double se = std::sqrt(ss / ((n - 1.0) * n));
        report.excursion_rate = mean / static_cast<double>(n_steps);
        report.excursion_rate_stderr = se / static_cast<double>(n_steps);
        report.excursion_rate_target = 1.0 / alpha;
    }

    return finish_report(exceed, std::move(report));
}

PoissonFitReport poisson_experiment_levy(const ModelSpec& model,
                                         const LevyConstants& constants,
                                         double lambda_target, double horizon,
                                         std::size_t replications, Stream stream,
                                         std::optional<double> y_override,
                                         int workers) {
    if (model.kind() != ModelKind::CompoundPoissonDrift)
        throw_error(ErrorCode::UnsupportedKind,
                    "Levy experiment simulates CompoundPoissonDrift only");
    if (replications < 500)
        throw_error(ErrorCode::InvalidParameter, "need >= 500 replications");
    if (!y_override && !(lambda_target >= 1e-4))
        throw_error(ErrorCode::InvalidParameter, "lambda_target must be >= 1e-4");

    const double gamma = constants.gamma;
    const double y =
        y_override ? *y_override
                   : std::max(std::log(horizon * constants.K_star /
                                       (constants.alpha_star * lambda_target)) /
                                  gamma,
                              0.0);

    PoissonFitReport report;
    report.lambda_target = lambda_target;
    report.lambda_used = lambda_target;  // asymptotic; no exact oracle for this kind
    report.lambda_oracle_exact = false;
    report.y_used = y;
    report.replications = replications;
    if (y_override && !(lambda_target > 0.0))
        throw_error(ErrorCode::InvalidParameter,
                    "Levy experiment needs lambda_target even with an explicit y");
    if (!(report.lambda_used >= 1e-4))
        throw_error(ErrorCode::InsufficientRate, "lambda below 1e-4");

    std::vector<std::size_t> exceed(replications, 0);
    std::vector<std::size_t> incomplete(replications, 0);
    parallel_for_index(replications, workers, [&](std::size_t rep) {
        Stream sub = stream.child(static_cast<std::uint64_t>(rep));
        const CpdEvents events = simulate_events(model, horizon, sub);
        const EventPath path = reflect_exact(events, model, horizon);
        std::size_t count = 0;
        for (const auto& e : path.excursions) {
            if (!e.complete) {
                ++incomplete[rep];
                continue;
            }
            if (e.height > y) ++count;
        }
        exceed[rep] = count;
    });
    for (std::size_t c : incomplete) report.incomplete_excursions += c;

    return finish_report(exceed, std::move(report));
}

}  // namespace reflev
