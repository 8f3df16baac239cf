#include "reflev/walk_engine.hpp"

#include <algorithm>
#include <cmath>

#include "reflev/errors.hpp"
#include "reflev/parallel.hpp"

namespace reflev {

PathSummary reflect_and_summarize(std::span<const double> steps) {
    PathSummary out;
    out.n = steps.size();
    out.partial_sums.resize(steps.size() + 1);
    out.running_min.resize(steps.size() + 1);
    out.reflected.resize(steps.size() + 1);
    double s = 0.0, mn = 0.0, best = 0.0;
    out.partial_sums[0] = out.running_min[0] = out.reflected[0] = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        s += steps[k];
        mn = std::min(mn, s);
        const double r = s - mn;
        out.partial_sums[k + 1] = s;
        out.running_min[k + 1] = mn;
        out.reflected[k + 1] = r;
        best = std::max(best, r);
    }
    out.max_segmental_score = best;
    return out;
}

ExcursionDecomposition decompose_excursions(std::span<const double> steps) {
    ExcursionDecomposition out;
    double s = 0.0;
    double start_level = 0.0;   // S at the last strict ladder epoch
    double peak = 0.0;          // max of S since then (includes the n=0 term)
    std::size_t start_idx = 0;
    std::size_t i = 0;
    for (std::size_t k = 1; k <= steps.size(); ++k) {
        s += steps[k - 1];
        peak = std::max(peak, s);
        if (s < start_level) {  // strict new minimum: ladder epoch T_i = k
            ExcursionRecord rec;
            rec.index = ++i;
            rec.start = start_idx;
            rec.length = k - start_idx;
            rec.height = peak - start_level;
            rec.ladder_increment = start_level - s;
            rec.peak_level = peak;
            out.complete.push_back(rec);
            start_level = s;
            peak = s;
            start_idx = k;
        }
    }
    if (start_idx < steps.size()) {
        IncompleteExcursion tail;
        tail.length = steps.size() - start_idx;
        tail.running_height = peak - start_level;
        tail.peak_level = peak;
        out.incomplete = tail;
    }
    return out;
}

std::size_t count_high_excursions(const std::vector<ExcursionRecord>& records,
                                  double y) {
    if (!(y >= 0.0)) throw_error(ErrorCode::InvalidParameter, "y must be >= 0");
    std::size_t n = 0;
    for (const auto& r : records)
        if (r.height > y) ++n;
    return n;
}

FirstLadderSample sample_first_ladder(const ModelSpec& model, Stream stream,
                                      std::size_t reps, std::uint64_t step_cap,
                                      int workers) {
    if (!model.is_walk())
        throw_error(ErrorCode::UnsupportedKind, "first-ladder sampling is walk-only");
    if (!(model.mean() < 0.0))
        throw_error(ErrorCode::NonNegativeMean, "first ladder epoch needs mean < 0");
    if (reps < 1 || step_cap < 1)
        throw_error(ErrorCode::InvalidParameter, "reps and step_cap must be >= 1");

    FirstLadderSample out;
    out.requested = reps;
    out.epochs.assign(reps, 0);
    out.heights.assign(reps, 0.0);
    out.excursion_max.assign(reps, 0.0);
    std::vector<std::uint8_t> censored(reps, 0);

    parallel_for_index(reps, workers, [&](std::size_t rep) {
        Stream sub = stream.child(static_cast<std::uint64_t>(rep));
        double s = 0.0, peak = 0.0;
        for (std::uint64_t k = 1; k <= step_cap; ++k) {
            s += model.sample_step(sub);
            peak = std::max(peak, s);
            if (s < 0.0) {
                out.epochs[rep] = k;
                out.heights[rep] = -s;
                out.excursion_max[rep] = peak;
                return;
            }
        }
        censored[rep] = 1;
    });

    // compact in replication order, keeping reductions index-ordered
    std::size_t kept = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        if (censored[rep]) {
            ++out.censored_count;
            continue;
        }
        out.epochs[kept] = out.epochs[rep];
        out.heights[kept] = out.heights[rep];
        out.excursion_max[kept] = out.excursion_max[rep];
        ++kept;
    }
    out.epochs.resize(kept);
    out.heights.resize(kept);
    out.excursion_max.resize(kept);

    if (out.censored_fraction() > 0.01)
        throw_error(ErrorCode::ExcessiveCensoring,
                    "more than 1% of first-ladder replications hit the step cap");
    return out;
}

TiltedLadderSample sample_weak_ascending_tilted(const ModelSpec& model,
                                                double gamma, Stream stream,
                                                std::size_t reps, int workers) {
    const ModelSpec tilted = model.tilt(gamma);  // validates the root
    if (!tilted.is_walk())
        throw_error(ErrorCode::UnsupportedKind, "tilted ladder sampling is walk-only");
    if (!(tilted.mean() > 0.0))
        throw_error(ErrorCode::NotARoot, "tilted mean must be positive");

    // Under positive drift the weak ascending epoch is finite a.s.; the cap
    // only guards against pathological parameters.
    constexpr std::uint64_t kAscendCap = 100'000'000;

    TiltedLadderSample out;
    out.requested = reps;
    out.h_plus.assign(reps, 0.0);
    out.weights.assign(reps, 0.0);
    std::vector<std::uint8_t> censored(reps, 0);

    parallel_for_index(reps, workers, [&](std::size_t rep) {
        Stream sub = stream.child(static_cast<std::uint64_t>(rep));
        double s = 0.0;
        for (std::uint64_t k = 1; k <= kAscendCap; ++k) {
            s += tilted.sample_step(sub);
            if (s >= 0.0) {
                out.h_plus[rep] = s;
                out.weights[rep] = std::exp(-gamma * s);
                return;
            }
        }
        censored[rep] = 1;
    });

    std::size_t kept = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        if (censored[rep]) {
            ++out.censored_count;
            continue;
        }
        out.h_plus[kept] = out.h_plus[rep];
        out.weights[kept] = out.weights[rep];
        ++kept;
    }
    out.h_plus.resize(kept);
    out.weights.resize(kept);
    return out;
}

StreamingCounts count_exceedances_streaming(const ModelSpec& model,
                                            std::uint64_t n_steps, double y,
                                            Stream& stream) {
    StreamingCounts out;
    double rel = 0.0;   // S relative to the last strict ladder level
    double peak = 0.0;  // max of rel over the open excursion
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        rel += model.sample_step(stream);
        peak = std::max(peak, rel);
        if (rel < 0.0) {
            ++out.complete_count;
            if (peak > y) ++out.exceed_count;
            rel = 0.0;
            peak = 0.0;
        }
    }
    out.incomplete_height = peak;
    return out;
}

}  // namespace reflev
