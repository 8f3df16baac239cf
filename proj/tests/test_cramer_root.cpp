#include <cmath>

#include "doctest.h"
#include "reflev/cramer_root.hpp"
#include "reflev/errors.hpp"

using namespace reflev;

TEST_CASE("closed-form roots matched to 1e-10") {
    const double ln3 = std::log(3.0);
    CHECK(solve_gamma(ModelSpec::two_point(0.25, 1, 1)).gamma ==
          doctest::Approx(ln3).epsilon(1e-10));
    CHECK(solve_gamma(ModelSpec::gaussian(-0.5, 1)).gamma ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(solve_gamma(ModelSpec::compound_poisson_drift(2, 1, 1)).gamma ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK(solve_gamma(ModelSpec::brownian_drift(0.5, 1)).gamma ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("root acceptance state: residual within gate, strict bracket") {
    const ModelSpec m = ModelSpec::two_point(0.25, 1, 1);
    const CramerRoot root = solve_gamma(m, 1e-12);
    CHECK(std::abs(root.residual) <= 1e-12 * (1.0 + root.gamma));
    CHECK(root.bracket_lo < root.gamma);
    CHECK(root.gamma < root.bracket_hi);
    CHECK(m.cumulant(root.bracket_lo) < 0.0);
    CHECK(m.cumulant(root.bracket_hi) > 0.0);
    CHECK(root.iterations <= 200 + 1100);
}

TEST_CASE("NoPositiveRoot for pure down-drift") {
    const ModelSpec m = ModelSpec::compound_poisson_drift(2.0, 0.0, 1.0);
    CHECK_THROWS_AS(solve_gamma(m), Error);
    try {
        solve_gamma(m);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoPositiveRoot);
    }
}

TEST_CASE("NonNegativeMean on a tilted (positive-mean) model") {
    const ModelSpec tilted = ModelSpec::gaussian(-0.5, 1).tilt(1.0);
    CHECK(tilted.mean() > 0.0);
    try {
        solve_gamma(tilted);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonNegativeMean);
    }
}

TEST_CASE("scale covariance: gamma(s * steps) = gamma(steps) / s") {
    const double base = solve_gamma(ModelSpec::two_point(0.25, 1, 1)).gamma;
    for (double s : {0.25, 0.5, 2.0, 7.5}) {
        const double scaled = solve_gamma(ModelSpec::two_point(0.25, s, s)).gamma;
        CHECK(scaled == doctest::Approx(base / s).epsilon(1e-10));
    }
}

TEST_CASE("bisection-only agrees with the hybrid") {
    const std::vector<ModelSpec> models = {
        ModelSpec::two_point(0.25, 1, 1), ModelSpec::two_point(0.45, 1, 1.5),
        ModelSpec::gaussian(-0.25, 0.7), ModelSpec::compound_poisson_drift(2, 1, 1),
        ModelSpec::brownian_drift(1.5, 2.0)};
    for (const auto& m : models) {
        const double tol = 1e-12;
        const double a = solve_gamma(m, tol, RootMethod::BisectionNewton).gamma;
        const double b = solve_gamma(m, tol, RootMethod::BisectionOnly).gamma;
        CHECK(std::abs(a - b) <= tol * std::max(1.0, a) * 4.0);
    }
}

TEST_CASE("root near the domain boundary (tiny rho)") {
    const ModelSpec m = ModelSpec::compound_poisson_drift(2.0, 1e-6, 1.0);
    const CramerRoot root = solve_gamma(m);
    CHECK(root.gamma == doctest::Approx(1.0 - 5e-7).epsilon(1e-9));
}
