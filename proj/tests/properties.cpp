// Randomized property suites. Each named suite runs >= 1000 generated cases.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "reflev/cpd_sim.hpp"
#include "reflev/cramer_root.hpp"
#include "reflev/model.hpp"
#include "reflev/rng.hpp"
#include "reflev/stat_kit.hpp"
#include "reflev/walk_engine.hpp"

using namespace reflev;

namespace {

// random negative-mean walk: lattice two-point or Gaussian
ModelSpec random_walk_model(Stream& gen) {
    if (gen.uniform_open() < 0.5) {
        const double p = 0.05 + 0.4 * gen.uniform_open();
        const double a_up = 0.25 * (1 + (gen.next_u64() % 8));
        double a_down = 0.25 * (1 + (gen.next_u64() % 8));
        while (p * a_up >= (1 - p) * a_down) a_down += 0.25;
        return ModelSpec::two_point(p, a_up, a_down);
    }
    const double mu = -0.1 - 1.5 * gen.uniform_open();
    const double sigma = 0.2 + 1.8 * gen.uniform_open();
    return ModelSpec::gaussian(mu, sigma);
}

std::vector<double> random_path(const ModelSpec& model, Stream& gen, std::size_t max_n) {
    const std::size_t n = gen.next_u64() % (max_n + 1);
    Stream steps = gen.child(gen.next_u64());
    return model.sample(steps, n);
}

}  // namespace

TEST_CASE("path-decomposition conservation") {
    Stream gen(1001);
    for (int rep = 0; rep < 1200; ++rep) {
        const ModelSpec model = random_walk_model(gen);
        const std::vector<double> steps = random_path(model, gen, 400);
        const auto dec = decompose_excursions(steps);
        std::size_t total = 0;
        for (const auto& rec : dec.complete) {
            CHECK(rec.length >= 1);
            CHECK(rec.ladder_increment > 0.0);
            CHECK(rec.height >= 0.0);
            total += rec.length;
        }
        if (dec.incomplete) total += dec.incomplete->length;
        CHECK(total == steps.size());
    }
}

TEST_CASE("supremum-decomposition identity") {
    Stream gen(1002);
    for (int rep = 0; rep < 1200; ++rep) {
        const ModelSpec model = random_walk_model(gen);
        const std::vector<double> steps = random_path(model, gen, 400);
        if (steps.empty()) continue;
        const PathSummary path = reflect_and_summarize(steps);
        const auto dec = decompose_excursions(steps);

        const double sup =
            *std::max_element(path.partial_sums.begin(), path.partial_sums.end());

        // bit-exact through the stored absolute peaks
        double peak = -std::numeric_limits<double>::infinity();
        for (const auto& rec : dec.complete) peak = std::max(peak, rec.peak_level);
        if (dec.incomplete) peak = std::max(peak, dec.incomplete->peak_level);
        CHECK(sup == peak);

        // the ladder-coordinate form max_i (h_i - H_{i-1}) agrees to rounding
        double ladder = -std::numeric_limits<double>::infinity();
        double H_prev = 0.0;
        for (const auto& rec : dec.complete) {
            ladder = std::max(ladder, rec.height - H_prev);
            H_prev += rec.ladder_increment;
        }
        if (dec.incomplete)
            ladder = std::max(ladder, dec.incomplete->running_height - H_prev);
        CHECK(std::abs(sup - ladder) <= 1e-9 * (1.0 + std::abs(sup)));
    }
}

TEST_CASE("maximal segmental score equals the height maximum exactly") {
    Stream gen(1003);
    for (int rep = 0; rep < 1200; ++rep) {
        const ModelSpec model = random_walk_model(gen);
        const std::vector<double> steps = random_path(model, gen, 400);
        const PathSummary path = reflect_and_summarize(steps);
        const auto dec = decompose_excursions(steps);
        double best = 0.0;
        for (const auto& rec : dec.complete) best = std::max(best, rec.height);
        if (dec.incomplete) best = std::max(best, dec.incomplete->running_height);
        CHECK(path.max_segmental_score == best);
    }
}

TEST_CASE("count monotonicity in the threshold") {
    Stream gen(1004);
    for (int rep = 0; rep < 1200; ++rep) {
        const ModelSpec model = random_walk_model(gen);
        const std::vector<double> steps = random_path(model, gen, 300);
        const auto dec = decompose_excursions(steps);
        std::size_t prev = dec.complete.size();
        for (double y = 0.0; y <= 6.0; y += 0.5) {
            const std::size_t count = count_high_excursions(dec.complete, y);
            CHECK(count <= prev);
            prev = count;
        }
    }
}

TEST_CASE("tilt composition at the cumulant level") {
    Stream gen(1005);
    int cases = 0;
    while (cases < 1000) {
        const ModelSpec model = [&] {
            const double u = gen.uniform_open();
            if (u < 0.35) {
                const double p = 0.05 + 0.35 * gen.uniform_open();
                return ModelSpec::two_point(p, 1.0, 1.0 + (gen.next_u64() % 3) * 0.5);
            }
            if (u < 0.7)
                return ModelSpec::gaussian(-0.2 - gen.uniform_open(),
                                           0.3 + gen.uniform_open());
            if (u < 0.85) {
                const double c = 1.0 + gen.uniform_open();
                const double nu = 0.5 + gen.uniform_open();
                const double rho = 0.8 * c * nu * gen.uniform_open();
                return ModelSpec::compound_poisson_drift(c, std::max(rho, 1e-3), nu);
            }
            return ModelSpec::brownian_drift(0.2 + gen.uniform_open(),
                                             0.4 + gen.uniform_open());
        }();
        const double gamma1 = solve_gamma(model).gamma;
        const double room = std::isfinite(model.theta_max())
                                ? (model.theta_max() - gamma1)
                                : gamma1 + 1.0;
        const double gamma2 = 0.5 * room * gen.uniform_open();
        if (!(gamma2 > 0.0)) continue;
        ++cases;

        const ModelSpec once = model.tilt(gamma1);
        CHECK(once.mean() > 0.0);  // tilted mean = kappa'(gamma) > 0
        CHECK(once.mean() ==
              doctest::Approx(model.cumulant_derivative(gamma1)).epsilon(1e-9));

        const ModelSpec twice = once.tilt_unchecked(gamma2);
        const ModelSpec direct = model.tilt_unchecked(gamma1 + gamma2);
        const double hi = std::isfinite(model.theta_max())
                              ? 0.9 * (model.theta_max() - gamma1 - gamma2)
                              : 2.0;
        if (!(hi > 0.0)) continue;
        for (int i = 0; i <= 10; ++i) {
            const double theta = hi * i / 10.0;
            CHECK(twice.cumulant(theta) ==
                  doctest::Approx(direct.cumulant(theta)).epsilon(1e-12));
        }
    }
}

TEST_CASE("cumulant convexity via three-point chords") {
    Stream gen(1006);
    for (int rep = 0; rep < 1200; ++rep) {
        const ModelSpec model = [&]() -> ModelSpec {
            const double u = gen.uniform_open();
            if (u < 0.4) {
                const double p = 0.05 + 0.4 * gen.uniform_open();
                return ModelSpec::two_point(p, 0.5 + gen.uniform_open(),
                                            1.0 + gen.uniform_open());
            }
            if (u < 0.7)
                return ModelSpec::gaussian(-0.2 - gen.uniform_open(),
                                           0.3 + gen.uniform_open());
            const double c = 1.0 + gen.uniform_open();
            const double nu = 0.5 + gen.uniform_open();
            return ModelSpec::compound_poisson_drift(
                c, std::max(0.8 * c * nu * gen.uniform_open(), 1e-3), nu);
        }();
        const double hi = std::isfinite(model.theta_max()) ? 0.95 * model.theta_max() : 4.0;
        double t1 = hi * gen.uniform_open();
        double t2 = hi * gen.uniform_open();
        double t3 = hi * gen.uniform_open();
        if (t1 > t2) std::swap(t1, t2);
        if (t2 > t3) std::swap(t2, t3);
        if (t1 > t2) std::swap(t1, t2);
        if (!(t3 - t1 > 1e-9)) continue;
        const double lam = (t2 - t1) / (t3 - t1);
        const double chord = (1 - lam) * model.cumulant(t1) + lam * model.cumulant(t3);
        const double scale =
            1.0 + std::abs(model.cumulant(t1)) + std::abs(model.cumulant(t3));
        CHECK(model.cumulant(t2) <= chord + 1e-12 * scale);
    }
}

TEST_CASE("exact reflection: split-and-concatenate, jump floor, local time") {
    Stream gen(1007);
    for (int rep = 0; rep < 400; ++rep) {
        const double c = 0.5 + 2.0 * gen.uniform_open();
        const double nu = 0.4 + 1.2 * gen.uniform_open();
        const double rho = std::max(0.8 * c * nu * gen.uniform_open(), 0.05);
        const ModelSpec model = ModelSpec::compound_poisson_drift(c, rho, nu);
        const double horizon = 5.0 + 45.0 * gen.uniform_open();
        const CpdEvents events =
            simulate_events(model, horizon, gen.child(gen.next_u64()));

        const EventPath whole = reflect_exact(events, model, horizon);

        // refine into two sub-horizons and continue
        const double t_split = horizon * gen.uniform_open();
        CpdReflector reflector(c);
        std::size_t split_idx = 0;
        for (; split_idx < events.times.size() && events.times[split_idx] <= t_split;
             ++split_idx)
            reflector.add_jump(events.times[split_idx], events.sizes[split_idx]);
        reflector.advance_to(t_split);  // sub-horizon boundary
        for (std::size_t i = split_idx; i < events.times.size(); ++i)
            reflector.add_jump(events.times[i], events.sizes[i]);
        reflector.finish(horizon);

        REQUIRE(whole.excursions.size() == reflector.excursions().size());
        for (std::size_t i = 0; i < whole.excursions.size(); ++i) {
            const auto& a = whole.excursions[i];
            const auto& b = reflector.excursions()[i];
            CHECK(a.start == b.start);
            CHECK(a.complete == b.complete);
            CHECK(a.end == doctest::Approx(b.end).epsilon(1e-9));
            CHECK(a.height == doctest::Approx(b.height).epsilon(1e-9));
        }
        CHECK(whole.local_time == doctest::Approx(reflector.local_time()).epsilon(1e-9));

        // heights are at least the opening jump; intervals are ordered in [0, t]
        std::size_t jump_idx = 0;
        double prev_end = 0.0;
        for (const auto& exc : whole.excursions) {
            while (jump_idx < events.times.size() && events.times[jump_idx] < exc.start)
                ++jump_idx;
            REQUIRE(jump_idx < events.times.size());
            CHECK(exc.height >= events.sizes[jump_idx]);
            CHECK(exc.start >= prev_end);
            CHECK(exc.end <= horizon);
            CHECK(exc.end > exc.start);
            prev_end = exc.end;
        }

        // L = c * (time at minimum) = -I, with I recomputed from the raw path
        CHECK(whole.local_time == c * whole.time_at_minimum);
        double jsum = 0.0, inf = 0.0;
        for (std::size_t i = 0; i < events.times.size(); ++i) {
            inf = std::min(inf, jsum - c * events.times[i]);
            jsum += events.sizes[i];
        }
        inf = std::min(inf, jsum - c * horizon);
        CHECK(-whole.local_time == doctest::Approx(inf).epsilon(1e-9));

        // counting consistency with the shared counter
        std::vector<ExcursionRecord> records;
        for (const auto& exc : whole.excursions)
            if (exc.complete) {
                ExcursionRecord rec;
                rec.height = exc.height;
                records.push_back(rec);
            }
        for (double y : {0.5, 2.0}) {
            std::size_t direct = 0;
            for (const auto& exc : whole.excursions)
                if (exc.complete && exc.height > y) ++direct;
            CHECK(direct == count_high_excursions(records, y));
        }
    }
}

TEST_CASE("poisson_gof is invariant under histogram permutation") {
    Stream gen(1008);
    for (int rep = 0; rep < 300; ++rep) {
        const double lambda = 0.5 + 4.0 * gen.uniform_open();
        std::vector<std::pair<long, std::size_t>> hist;
        std::size_t total = 0;
        for (long k = 0; k < 12; ++k) {
            const auto freq = static_cast<std::size_t>(gen.next_u64() % 40);
            if (freq) {
                hist.push_back({k, freq});
                total += freq;
            }
        }
        if (total < 50) continue;
        auto shuffled = hist;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[gen.next_u64() % i]);
        const GofResult a = poisson_gof(hist, lambda);
        const GofResult b = poisson_gof(shuffled, lambda);
        CHECK(a.chi_square == b.chi_square);
        CHECK(a.dof == b.dof);
        CHECK(a.p_value == b.p_value);
        CHECK(a.tv_distance == b.tv_distance);
    }
}
