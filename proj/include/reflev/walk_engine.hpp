#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reflev/model.hpp"
#include "reflev/rng.hpp"

namespace reflev {

// One pass over a step sequence: partial sums, running minimum, reflected
// path R = S - I and its running maximum (the maximal segmental score).
struct PathSummary {
    std::size_t n = 0;
    std::vector<double> partial_sums;  // S_0..S_n, S_0 = 0
    std::vector<double> running_min;   // I_0..I_n
    std::vector<double> reflected;     // R_k = S_k - I_k
    double max_segmental_score = 0.0;
};

// One completed excursion above the running minimum, delimited by strict
// descending ladder epochs T_{i-1} < T_i.
struct ExcursionRecord {
    std::size_t index = 0;       // i >= 1
    std::size_t start = 0;       // ladder epoch T_{i-1}
    std::size_t length = 0;      // T_i - T_{i-1} >= 1
    double height = 0.0;         // h_i = max_{0<=n<=len} (S_{start+n} - S_start)
    double ladder_increment = 0.0;  // H_i - H_{i-1} > 0
    double peak_level = 0.0;     // max of S over the excursion (absolute)
};

struct IncompleteExcursion {
    std::size_t length = 0;
    double running_height = 0.0;
    double peak_level = 0.0;
};

struct ExcursionDecomposition {
    std::vector<ExcursionRecord> complete;
    std::optional<IncompleteExcursion> incomplete;
};

// First-descending-ladder replications: (T_1, H_1, h_1) triples.
struct FirstLadderSample {
    std::vector<std::uint64_t> epochs;   // T_1
    std::vector<double> heights;         // H_1 = |S(T_1)|
    std::vector<double> excursion_max;   // h_1
    std::size_t censored_count = 0;
    std::size_t requested = 0;

    double censored_fraction() const {
        return requested == 0 ? 0.0
                              : static_cast<double>(censored_count) / requested;
    }
};

// Weak-ascending-ladder replications under the tilted (positive-drift) law:
// H_plus = S at the first k >= 1 with S_k >= 0, weight = e^{-gamma H_plus}.
struct TiltedLadderSample {
    std::vector<double> h_plus;
    std::vector<double> weights;
    std::size_t censored_count = 0;
    std::size_t requested = 0;
};

PathSummary reflect_and_summarize(std::span<const double> steps);

ExcursionDecomposition decompose_excursions(std::span<const double> steps);

// #{i : h_i > y} over complete excursions (strict inequality).
std::size_t count_high_excursions(const std::vector<ExcursionRecord>& records,
                                  double y);

inline constexpr std::uint64_t kDefaultStepCap = 10'000'000;

// Simulates each replication to its first strict descending ladder epoch on
// substream child(rep). Replications exceeding step_cap are censored and
// excluded from the stored triples; throws ExcessiveCensoring above 1%.
FirstLadderSample sample_first_ladder(const ModelSpec& model, Stream stream,
                                      std::size_t reps,
                                      std::uint64_t step_cap = kDefaultStepCap,
                                      int workers = 1);

TiltedLadderSample sample_weak_ascending_tilted(const ModelSpec& model,
                                                double gamma, Stream stream,
                                                std::size_t reps,
                                                int workers = 1);

// Streaming form of decompose + count for long horizons: number of complete
// excursions with h > y and the total complete-excursion count, plus the
// interim height of the trailing incomplete segment.
struct StreamingCounts {
    std::size_t exceed_count = 0;
    std::size_t complete_count = 0;
    double incomplete_height = 0.0;
};

StreamingCounts count_exceedances_streaming(const ModelSpec& model,
                                            std::uint64_t n_steps, double y,
                                            Stream& stream);

}  // namespace reflev
