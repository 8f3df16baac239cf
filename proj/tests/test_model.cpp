#include <cmath>
#include <vector>

#include "doctest.h"
#include "reflev/errors.hpp"
#include "reflev/model.hpp"

using namespace reflev;

namespace {
const double kLn3 = std::log(3.0);
}

TEST_CASE("cumulant closed-form spot values") {
    // kappa(theta) = mu theta + sigma^2 theta^2 / 2
    CHECK(ModelSpec::gaussian(-0.5, 1.0).cumulant(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    // p e^theta + q e^-theta = 1 at theta = log(q/p)
    CHECK(ModelSpec::two_point(0.25, 1, 1).cumulant(kLn3) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // -c theta + rho theta/(nu - theta): -1 + 1 = 0
    CHECK(ModelSpec::compound_poisson_drift(2, 1, 1).cumulant(0.5) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("cumulant domain boundary") {
    const ModelSpec cpd = ModelSpec::compound_poisson_drift(2, 1, 1);
    CHECK_THROWS_AS(cpd.cumulant(1.0), Error);
    try {
        cpd.cumulant(1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DomainBoundary);
    }
    CHECK_THROWS_AS(cpd.cumulant(-0.1), Error);
    // walks have unbounded domains
    CHECK(std::isinf(ModelSpec::gaussian(-0.5, 1).theta_max()));
    CHECK(cpd.theta_max() == 1.0);
}

TEST_CASE("kappa(0) = 0 exactly for every kind") {
    CHECK(ModelSpec::two_point(0.3, 1.5, 2.0).cumulant(0.0) == 0.0);
    CHECK(ModelSpec::gaussian(-0.5, 1).cumulant(0.0) == 0.0);
    CHECK(ModelSpec::compound_poisson_drift(2, 1, 1).cumulant(0.0) == 0.0);
    CHECK(ModelSpec::brownian_drift(0.5, 1).cumulant(0.0) == 0.0);
}

TEST_CASE("mean and span per kind") {
    auto [m1, d1] = ModelSpec::two_point(0.25, 1, 1).mean_and_span();
    CHECK(m1 == doctest::Approx(-0.5));
    CHECK(d1 == doctest::Approx(1.0));

    auto [m2, d2] = ModelSpec::gaussian(-0.5, 1).mean_and_span();
    CHECK(m2 == -0.5);
    CHECK(d2 == 0.0);

    auto [m3, d3] = ModelSpec::compound_poisson_drift(2, 1, 1).mean_and_span();
    CHECK(m3 == doctest::Approx(-1.0));
    CHECK(d3 == 0.0);

    CHECK(ModelSpec::brownian_drift(0.5, 1).mean() == -0.5);
}

TEST_CASE("lattice span detection") {
    CHECK(detect_lattice_span(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(detect_lattice_span(2.0, 1.0) == doctest::Approx(1.0));
    CHECK(detect_lattice_span(1.5, 1.0) == doctest::Approx(0.5));
    CHECK(detect_lattice_span(0.75, 0.5) == doctest::Approx(0.25));
    // 355/113 is close to pi but not within the rational gate
    CHECK(detect_lattice_span(M_PI, 1.0) == 0.0);
    CHECK(detect_lattice_span(std::sqrt(2.0), 1.0) == 0.0);
    // denominators above 1e6 are treated as nonlattice
    CHECK(detect_lattice_span(1.0 + 1.0 / 3000000.0, 1.0) == 0.0);
}

TEST_CASE("negative-mean gate at construction") {
    CHECK_THROWS_AS(ModelSpec::two_point(0.5, 1, 1), Error);   // mean 0
    CHECK_THROWS_AS(ModelSpec::two_point(0.6, 1, 1), Error);   // mean > 0
    CHECK_THROWS_AS(ModelSpec::gaussian(0.1, 1), Error);
    CHECK_THROWS_AS(ModelSpec::gaussian(0.0, 1), Error);
    CHECK_THROWS_AS(ModelSpec::compound_poisson_drift(1, 2, 1), Error);  // mean +1
    try {
        ModelSpec::gaussian(0.1, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonNegativeMean);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelSpec::two_point(0.25, -1, 1), Error);
    CHECK_THROWS_AS(ModelSpec::gaussian(-0.5, 0.0), Error);
    CHECK_THROWS_AS(ModelSpec::compound_poisson_drift(0.0, 1, 1), Error);
    CHECK_THROWS_AS(ModelSpec::brownian_drift(-0.5, 1), Error);
    // rho = 0 is the admitted degenerate boundary
    CHECK(ModelSpec::compound_poisson_drift(2, 0, 1).mean() == -2.0);
}

TEST_CASE("tilt closed forms") {
    // Gaussian tilt shifts the mean by gamma sigma^2
    const ModelSpec g = ModelSpec::gaussian(-0.5, 1.0).tilt(1.0);
    CHECK(g.gaussian_params().mu == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.gaussian_params().sigma == 1.0);
    CHECK(g.tilted());

    // p' = p e^gamma / (p e^gamma + q e^-gamma) = 0.75 at gamma = ln 3
    const ModelSpec t = ModelSpec::two_point(0.25, 1, 1).tilt(kLn3);
    CHECK(t.two_point_params().p == doctest::Approx(0.75).epsilon(1e-14));

    // term-by-term match of kappa_tilt: (c, rho nu/(nu-gamma), nu-gamma)
    const ModelSpec cpd = ModelSpec::compound_poisson_drift(2, 1, 1).tilt(0.5);
    CHECK(cpd.compound_poisson_params().c == 2.0);
    CHECK(cpd.compound_poisson_params().rho == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(cpd.compound_poisson_params().nu == doctest::Approx(0.5).epsilon(1e-14));

    const ModelSpec bm = ModelSpec::brownian_drift(0.5, 1.0).tilt(1.0);
    CHECK(bm.brownian_params().drift == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("tilt errors") {
    const ModelSpec m = ModelSpec::gaussian(-0.5, 1.0);
    CHECK_THROWS_AS(m.tilt(0.5), Error);  // not a root
    try {
        m.tilt(0.5);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotARoot);
    }
    const ModelSpec cpd = ModelSpec::compound_poisson_drift(2, 1, 1);
    CHECK_THROWS_AS(cpd.tilt(1.5), Error);  // beyond theta_max
    CHECK_THROWS_AS(cpd.tilt(-0.5), Error);
}

TEST_CASE("tilt identity kappa_tilt(theta) = kappa(theta+gamma) - kappa(gamma)") {
    struct Case {
        ModelSpec model;
        double gamma;
        double theta_hi;
    };
    const std::vector<Case> cases = {
        {ModelSpec::two_point(0.25, 1, 1), kLn3, 3.0},
        {ModelSpec::two_point(0.3, 0.7, 1.9), 0.9, 2.0},
        {ModelSpec::gaussian(-0.5, 1), 1.0, 3.0},
        {ModelSpec::compound_poisson_drift(2, 1, 1), 0.5, 0.49},
        {ModelSpec::brownian_drift(0.5, 1), 2.0, 3.0},
    };
    for (const auto& cs : cases) {
        const ModelSpec tilted = cs.model.tilt_unchecked(cs.gamma);
        const double shift = cs.model.cumulant(cs.gamma);
        for (int i = 0; i <= 40; ++i) {
            const double theta = cs.theta_hi * i / 40.0;
            CHECK(tilted.cumulant(theta) ==
                  doctest::Approx(cs.model.cumulant(theta + cs.gamma) - shift)
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("sampling determinism and support") {
    const ModelSpec m = ModelSpec::two_point(0.25, 1, 1);
    Stream s1(5), s2(5);
    const auto a = m.sample(s1, 5);
    const auto b = m.sample(s2, 5);
    CHECK(a == b);
    for (double x : a) CHECK((x == 1.0 || x == -1.0));

    Stream s3(6);
    CHECK_THROWS_AS(ModelSpec::compound_poisson_drift(2, 1, 1).sample(s3, 3), Error);
}

TEST_CASE("Gaussian sample mean inside the 4-sigma CLT band") {
    const ModelSpec m = ModelSpec::gaussian(-0.5, 1.0);
    Stream s(2024);
    const std::size_t n = 100000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += m.sample_step(s);
    CHECK(std::abs(sum / static_cast<double>(n) + 0.5) < 0.0127);  // 4 sigma / sqrt(n)
}

TEST_CASE("cumulant derivative matches finite differences") {
    const std::vector<ModelSpec> models = {
        ModelSpec::two_point(0.25, 1, 1), ModelSpec::two_point(0.4, 0.5, 1.25),
        ModelSpec::gaussian(-0.5, 1), ModelSpec::compound_poisson_drift(2, 1, 1),
        ModelSpec::brownian_drift(0.5, 1)};
    for (const auto& m : models) {
        const double hi = std::isfinite(m.theta_max()) ? 0.9 * m.theta_max() : 2.0;
        for (int i = 1; i <= 10; ++i) {
            const double theta = hi * i / 11.0;
            const double h = 1e-6 * std::max(1.0, theta);
            const double fd = (m.cumulant(theta + h) - m.cumulant(theta - h)) / (2 * h);
            CHECK(m.cumulant_derivative(theta) == doctest::Approx(fd).epsilon(1e-6));
        }
        CHECK(m.cumulant_derivative(0.0) == doctest::Approx(m.mean()).epsilon(1e-12));
    }
}
