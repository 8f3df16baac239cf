#include "reflev/cpd_sim.hpp"

#include <algorithm>
#include <cmath>

#include "reflev/errors.hpp"
#include "reflev/parallel.hpp"

namespace reflev {

CpdEvents simulate_events(const ModelSpec& model, double horizon, Stream stream) {
    const auto& p = model.compound_poisson_params();
    if (!(horizon > 0.0))
        throw_error(ErrorCode::InvalidParameter, "horizon must be > 0");
    CpdEvents out;
    out.horizon = horizon;
    if (p.rho <= 0.0) return out;
    double t = 0.0;
    while (true) {
        t += stream.exponential(p.rho);
        if (t > horizon) break;
        out.times.push_back(t);
        out.sizes.push_back(stream.exponential(p.nu));
    }
    return out;
}

CpdReflector::CpdReflector(double drift_rate) : drift_rate_(drift_rate) {
    if (!(drift_rate > 0.0))
        throw_error(ErrorCode::InvalidParameter, "drift rate must be > 0");
}

void CpdReflector::advance_to(double t) {
    if (t < t_cur_) throw_error(ErrorCode::InvalidParameter, "events out of order");
    if (y_ > 0.0) {
        const double hit = t_cur_ + y_ / drift_rate_;
        if (hit <= t) {
            // the excursion closes when Y creeps back to 0
            excursions_.push_back({open_start_, hit, open_peak_, true});
            open_ = false;
            y_ = 0.0;
            time_at_min_ += t - hit;
        } else {
            y_ -= drift_rate_ * (t - t_cur_);
        }
    } else {
        time_at_min_ += t - t_cur_;
    }
    t_cur_ = t;
}

void CpdReflector::add_jump(double t, double size) {
    advance_to(t);
    if (y_ > 0.0) {
        y_ += size;
        open_peak_ = std::max(open_peak_, y_);
    } else {
        y_ = size;
        open_ = true;
        open_start_ = t;
        open_peak_ = size;
    }
}

void CpdReflector::finish(double horizon) {
    advance_to(horizon);
    if (open_ && y_ > 0.0) {
        excursions_.push_back({open_start_, horizon, open_peak_, false});
        open_ = false;
    }
}

EventPath reflect_exact(const CpdEvents& events, const ModelSpec& model,
                        double horizon) {
    const auto& p = model.compound_poisson_params();
    EventPath out;
    out.horizon = horizon;
    out.jump_times = events.times;
    out.jump_sizes = events.sizes;
    CpdReflector reflector(p.c);
    for (std::size_t i = 0; i < events.times.size(); ++i)
        reflector.add_jump(events.times[i], events.sizes[i]);
    reflector.finish(horizon);
    out.time_at_minimum = reflector.time_at_minimum();
    out.local_time = reflector.local_time();
    out.excursions = reflector.take_excursions();
    return out;
}

EtaTailEstimate eta_tail_estimate(const ModelSpec& model, double gamma,
                                  const std::vector<double>& x_grid,
                                  double total_horizon, std::size_t batches,
                                  Stream stream, int workers) {
    if (batches < 10)
        throw_error(ErrorCode::InvalidParameter, "need at least 10 batches");
    if (x_grid.empty())
        throw_error(ErrorCode::InvalidParameter, "x_grid must be nonempty");
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (!(x_grid[i] > 0.0) || (i > 0 && !(x_grid[i] > x_grid[i - 1])))
            throw_error(ErrorCode::InvalidParameter, "x_grid must be positive ascending");
    }

    const double batch_horizon = total_horizon / static_cast<double>(batches);
    struct BatchResult {
        double local_time = 0.0;
        std::vector<std::size_t> counts;  // per x
        std::size_t complete = 0;
        std::size_t incomplete = 0;
    };
    std::vector<BatchResult> results(batches);

    parallel_for_index(batches, workers, [&](std::size_t b) {
        Stream sub = stream.child(static_cast<std::uint64_t>(b));
        const CpdEvents events = simulate_events(model, batch_horizon, sub);
        const EventPath path = reflect_exact(events, model, batch_horizon);
        BatchResult& res = results[b];
        res.local_time = path.local_time;
        res.counts.assign(x_grid.size(), 0);
        std::vector<double> heights;
        heights.reserve(path.excursions.size());
        for (const auto& e : path.excursions) {
            if (!e.complete) {
                ++res.incomplete;
                continue;
            }
            heights.push_back(e.height);
        }
        res.complete = heights.size();
        std::sort(heights.begin(), heights.end());
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            const auto it =
                std::upper_bound(heights.begin(), heights.end(), x_grid[j]);
            res.counts[j] = static_cast<std::size_t>(heights.end() - it);
        }
    });

    EtaTailEstimate out;
    out.gamma = gamma;
    out.total_horizon = total_horizon;
    out.batches = batches;
    double total_lt = 0.0;
    std::vector<std::size_t> total_counts(x_grid.size(), 0);
    for (const auto& res : results) {
        if (!(res.local_time > 0.0))
            throw_error(ErrorCode::InsufficientCounts,
                        "a batch accrued no local time; use a longer horizon");
        total_lt += res.local_time;
        out.total_complete += res.complete;
        out.incomplete_excursions += res.incomplete;
        for (std::size_t j = 0; j < x_grid.size(); ++j)
            total_counts[j] += res.counts[j];
    }
    out.total_local_time = total_lt;

    if (total_counts.back() < 10)
        throw_error(ErrorCode::InsufficientCounts,
                    "fewer than 10 exceedances at the largest x");

    auto batch_stderr = [&](auto per_batch) {
        double mean = 0.0;
        for (std::size_t b = 0; b < batches; ++b) mean += per_batch(b);
        mean /= static_cast<double>(batches);
        double ss = 0.0;
        for (std::size_t b = 0; b < batches; ++b) {
            const double d = per_batch(b) - mean;
            ss += d * d;
        }
        const double var_of_mean =
            ss / (static_cast<double>(batches - 1) * static_cast<double>(batches));
        return std::pair<double, double>(mean, std::sqrt(var_of_mean));
    };

    out.points.resize(x_grid.size());
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        out.points[j].x = x_grid[j];
        out.points[j].eta_hat = static_cast<double>(total_counts[j]) / total_lt;
        out.points[j].stderr_ = batch_stderr([&](std::size_t b) {
                                    return static_cast<double>(results[b].counts[j]) /
                                           results[b].local_time;
                                }).second;
    }

    const auto eta0 = batch_stderr([&](std::size_t b) {
        return static_cast<double>(results[b].complete) / results[b].local_time;
    });
    out.eta0_hat = static_cast<double>(out.total_complete) / total_lt;
    out.eta0_stderr = eta0.second;

    const auto lt = batch_stderr(
        [&](std::size_t b) { return results[b].local_time / batch_horizon; });
    out.lt_over_t_mean = lt.first;
    out.lt_over_t_stderr = lt.second;
    return out;
}

}  // namespace reflev
