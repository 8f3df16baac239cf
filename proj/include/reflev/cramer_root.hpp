#pragma once

#include "reflev/model.hpp"

namespace reflev {

struct CramerRoot {
    double gamma = 0.0;
    double residual = 0.0;  // kappa(gamma) at acceptance
    int iterations = 0;
    double bracket_lo = 0.0;  // kappa(lo) < 0
    double bracket_hi = 0.0;  // kappa(hi) > 0
};

enum class RootMethod {
    BisectionNewton,  // bisect to a coarse bracket, then Newton polish
    BisectionOnly,    // cross-check path
};

// Solves kappa(gamma) = 0 for the unique positive root. kappa is strictly
// convex with kappa(0) = 0 and kappa'(0) = mean < 0, so at most one positive
// root exists; for bounded domains kappa -> +inf at nu, guaranteeing one
// whenever rho > 0.
CramerRoot solve_gamma(const ModelSpec& model, double tol = 1e-12,
                       RootMethod method = RootMethod::BisectionNewton);

// Closed-form root where one exists (used by tests and the closed-form
// constants paths): TwoPointWalk with a_up == a_down, GaussianWalk,
// CompoundPoissonDrift, BrownianDrift.
double closed_form_gamma(const ModelSpec& model);

}  // namespace reflev
