#pragma once

#include <cstddef>
#include <vector>

#include "reflev/model.hpp"
#include "reflev/rng.hpp"

namespace reflev {

// Raw event list for a compound-Poisson-with-drift path.
struct CpdEvents {
    double horizon = 0.0;
    std::vector<double> times;  // 0 < tau_1 < ... <= horizon
    std::vector<double> sizes;  // J_i > 0
};

struct CpdExcursion {
    double start = 0.0;
    double end = 0.0;
    double height = 0.0;
    bool complete = true;
};

// Exact piecewise-linear reflected path: between jumps Y decays at rate c;
// local time accrues at rate c while Y = 0, so L_t = c * time_at_minimum
// and L_t = -I_t identically.
struct EventPath {
    double horizon = 0.0;
    std::vector<double> jump_times;
    std::vector<double> jump_sizes;
    std::vector<CpdExcursion> excursions;
    double local_time = 0.0;
    double time_at_minimum = 0.0;
};

CpdEvents simulate_events(const ModelSpec& model, double horizon, Stream stream);

// Incremental exact reflection; feeding events in time order and finishing
// at any horizon is associative (splitting a horizon into sub-horizons and
// continuing yields the identical path).
class CpdReflector {
  public:
    explicit CpdReflector(double drift_rate);

    void advance_to(double t);
    void add_jump(double t, double size);

    // Closes bookkeeping at the horizon; an excursion still open is recorded
    // with complete = false. The reflector can keep running afterwards only
    // if no incomplete excursion was flushed, so treat this as terminal.
    void finish(double horizon);

    double reflected_value() const { return y_; }
    double time_at_minimum() const { return time_at_min_; }
    double local_time() const { return drift_rate_ * time_at_min_; }
    double infimum() const { return -drift_rate_ * time_at_min_; }
    const std::vector<CpdExcursion>& excursions() const { return excursions_; }
    std::vector<CpdExcursion>&& take_excursions() { return std::move(excursions_); }

  private:
    double drift_rate_;
    double t_cur_ = 0.0;
    double y_ = 0.0;
    double time_at_min_ = 0.0;
    bool open_ = false;
    double open_start_ = 0.0;
    double open_peak_ = 0.0;
    std::vector<CpdExcursion> excursions_;
};

EventPath reflect_exact(const CpdEvents& events, const ModelSpec& model,
                        double horizon);

struct EtaTailPoint {
    double x = 0.0;
    double eta_hat = 0.0;
    double stderr_ = 0.0;
};

struct EtaTailEstimate {
    std::vector<EtaTailPoint> points;
    double gamma = 0.0;
    double total_local_time = 0.0;
    double total_horizon = 0.0;
    std::size_t batches = 0;
    std::size_t total_complete = 0;
    std::size_t incomplete_excursions = 0;  // horizon-straddlers, excluded from counts
    double eta0_hat = 0.0;   // all completed excursions per unit local time
    double eta0_stderr = 0.0;
    double lt_over_t_mean = 0.0;  // batch mean of L_t / t
    double lt_over_t_stderr = 0.0;
};

// eta_hat(x) = (# complete excursions with h > x over all batches) / (total
// local time); stderr from independent batch rates. Throws
// InsufficientCounts when the largest x sees fewer than 10 exceedances.
EtaTailEstimate eta_tail_estimate(const ModelSpec& model, double gamma,
                                  const std::vector<double>& x_grid,
                                  double total_horizon, std::size_t batches,
                                  Stream stream, int workers = 1);

}  // namespace reflev
