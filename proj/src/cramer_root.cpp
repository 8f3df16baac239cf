#include "reflev/cramer_root.hpp"

#include <algorithm>
#include <cmath>

#include "reflev/errors.hpp"

namespace reflev {

namespace {

constexpr int kIterationCap = 200;

double residual_scale(const ModelSpec& model, double gamma) {
    const double slope = model.cumulant_derivative(gamma);
    return std::max(std::abs(slope) * std::abs(gamma), 1e-300);
}

}  // namespace

double closed_form_gamma(const ModelSpec& model) {
    switch (model.kind()) {
        case ModelKind::TwoPointWalk: {
            const auto& p = model.two_point_params();
            if (p.a_up != p.a_down)
                throw_error(ErrorCode::UnsupportedModel,
                            "closed-form gamma needs a_up == a_down");
            return std::log((1.0 - p.p) / p.p) / p.a_up;
        }
        case ModelKind::GaussianWalk: {
            const auto& p = model.gaussian_params();
            return -2.0 * p.mu / (p.sigma * p.sigma);
        }
        case ModelKind::CompoundPoissonDrift: {
            const auto& p = model.compound_poisson_params();
            if (p.rho <= 0.0)
                throw_error(ErrorCode::NoPositiveRoot, "pure down-drift has no root");
            return p.nu - p.rho / p.c;
        }
        case ModelKind::BrownianDrift: {
            const auto& p = model.brownian_params();
            return -2.0 * p.drift / (p.sigma * p.sigma);
        }
    }
    throw_error(ErrorCode::UnsupportedModel, "unknown kind");
}

CramerRoot solve_gamma(const ModelSpec& model, double tol, RootMethod method) {
    if (!(tol > 0.0)) throw_error(ErrorCode::InvalidParameter, "tol must be > 0");
    if (!(model.mean() < 0.0))
        throw_error(ErrorCode::NonNegativeMean, "solve_gamma requires mean < 0");

    int iterations = 0;

    // Upper bracket: kappa(hi) > 0. Bounded domains start just inside the
    // boundary and creep closer if needed (the root can sit arbitrarily near
    // nu when rho is tiny); unbounded domains expand geometrically.
    double hi;
    const double theta_max = model.theta_max();
    if (std::isfinite(theta_max)) {
        const double ceiling = std::nextafter(theta_max, 0.0);
        double gap = 1e-9;
        hi = std::min(theta_max * (1.0 - gap), ceiling);
        while (model.cumulant(hi) <= 0.0 && gap > 2e-15) {
            gap *= 1e-3;
            hi = std::min(theta_max * (1.0 - gap), ceiling);
            ++iterations;
        }
        if (model.cumulant(hi) <= 0.0)
            throw_error(ErrorCode::NoPositiveRoot,
                        "kappa < 0 on [0, theta_max); no positive root");
    } else {
        hi = 1.0;
        int expansions = 0;
        while (!(model.cumulant(hi) > 0.0)) {
            hi *= 2.0;
            if (++expansions > 1100 || !std::isfinite(hi))
                throw_error(ErrorCode::NoPositiveRoot,
                            "kappa never becomes positive; no positive root");
        }
        iterations += expansions;
    }

    // Bisection from [0, hi]; kappa(0) = 0 with kappa < 0 just right of 0,
    // so the midpoint sign drives both ends toward the root. Runs until the
    // bracket is strict (kappa(lo) < 0) and coarse, or to full width for the
    // bisection-only method.
    double lo = 0.0;
    double f_lo = 0.0;
    const bool polish = (method == RootMethod::BisectionNewton);
    auto coarse_enough = [&] {
        if (f_lo >= 0.0) return false;
        const double width_gate = polish ? 1e-2 : tol;
        return (hi - lo) <= width_gate * std::max(lo, 1e-300);
    };
    while (!coarse_enough()) {
        if (++iterations > kIterationCap + 1100)
            throw_error(ErrorCode::ToleranceNotReached, "bisection did not converge");
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // width at floating-point floor
        const double f_mid = model.cumulant(mid);
        if (f_mid > 0.0) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }

    double gamma = 0.5 * (lo + hi);
    double residual = model.cumulant(gamma);

    if (polish) {
        for (int i = 0; i < kIterationCap; ++i) {
            ++iterations;
            if (std::abs(residual) <= tol * residual_scale(model, gamma)) break;
            // keep the strict bracket current
            if (residual > 0.0) hi = gamma; else lo = gamma;
            const double slope = model.cumulant_derivative(gamma);
            double next = gamma - residual / slope;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            gamma = next;
            residual = model.cumulant(gamma);
        }
        if (std::abs(residual) > tol * residual_scale(model, gamma))
            throw_error(ErrorCode::ToleranceNotReached,
                        "Newton polish did not reach tolerance");
    }

    CramerRoot out;
    out.gamma = gamma;
    out.residual = residual;
    out.iterations = iterations;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

}  // namespace reflev
