#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "reflev/constants.hpp"
#include "reflev/model.hpp"
#include "reflev/rng.hpp"

namespace reflev {

struct TailFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    std::size_t points_used = 0;
    std::size_t dropped_zero_survival = 0;
};

// Weighted least squares of log(survival) on x; weights are inverse
// variances of log survival and are treated as known.
TailFit tail_fit(std::span<const double> x, std::span<const double> survival,
                 std::span<const double> weights);

// Empirical survival of a sample on a grid, with the delta-method inverse
// variance of log survival as fit weight: w = n S / (1 - S). Points with
// S = 0 or S = 1 are omitted.
struct SurvivalCurve {
    std::vector<double> x;
    std::vector<double> survival;
    std::vector<double> weights;
};
SurvivalCurve empirical_survival(std::span<const double> sample,
                                 std::span<const double> grid);

struct GofResult {
    double chi_square = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    double tv_distance = 0.0;
    std::size_t cells = 0;
};

// Chi-square against the Poisson(lambda) pmf. Cells are built from the pmf
// alone: singleton counts until the open tail's expected mass drops under 5,
// then any light cell is merged into its neighbor toward the tail. dof =
// cells - 1 (lambda is given, not fitted).
GofResult poisson_gof(const std::vector<std::pair<long, std::size_t>>& histogram,
                      double lambda);

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_ci(std::size_t k, std::size_t n, double confidence);

struct PoissonFitReport {
    double lambda_target = 0.0;
    double lambda_used = 0.0;     // oracle-exact when available, else the target
    bool lambda_oracle_exact = false;
    double y_used = 0.0;
    std::size_t replications = 0;
    double mean_count = 0.0;
    double mean_count_stderr = 0.0;
    std::vector<std::pair<long, std::size_t>> histogram;  // count value -> frequency
    std::vector<std::size_t> replication_counts;          // in replication order
    GofResult gof;
    // walk-side strong-law check: (# complete excursions)/n vs 1/alpha
    std::optional<double> excursion_rate = std::nullopt;
    double excursion_rate_stderr = 0.0;
    double excursion_rate_target = 0.0;
    std::size_t incomplete_excursions = 0;  // Levy horizon-straddlers (bias note)
};

// Walk experiment: threshold y from (1/gamma) log(nK/(alpha lambda)) (or the
// explicit override), rounded to the lattice for lattice models; lambda is
// recomputed from the exact tail oracle when one exists (TwoPointWalk with
// a_up = a_down). Each replication simulates n steps and counts complete
// excursions with h > y.
PoissonFitReport poisson_experiment_walk(const ModelSpec& model,
                                         const RwConstants& constants,
                                         double lambda_target,
                                         std::uint64_t n_steps,
                                         std::size_t replications, Stream stream,
                                         std::optional<double> y_override = std::nullopt,
                                         int workers = 1);

// Levy experiment (CompoundPoissonDrift only; Brownian paths are covered by
// closed forms, not simulation): y from (1/gamma) log(t K*/(alpha* lambda)).
PoissonFitReport poisson_experiment_levy(const ModelSpec& model,
                                         const LevyConstants& constants,
                                         double lambda_target, double horizon,
                                         std::size_t replications, Stream stream,
                                         std::optional<double> y_override = std::nullopt,
                                         int workers = 1);

}  // namespace reflev
