#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "reflev/rng.hpp"

namespace reflev {

enum class ModelKind {
    TwoPointWalk,
    GaussianWalk,
    CompoundPoissonDrift,
    BrownianDrift,
};

const char* model_kind_name(ModelKind kind);

struct TwoPointParams {
    double p;       // probability of the up-step
    double a_up;    // up-step magnitude
    double a_down;  // down-step magnitude
};

struct GaussianParams {
    double mu;
    double sigma;
};

struct CompoundPoissonParams {
    double c;    // downward drift rate per unit time
    double rho;  // jump intensity per unit time
    double nu;   // jumps are exponential with mean 1/nu
};

struct BrownianParams {
    double drift;  // signed; public construction uses -mu_abs
    double sigma;
};

// A step law (walk kinds, per step) or Levy mechanism (per unit time),
// with its cumulant, closed-form derivative, mean, lattice span and sampler.
// Instances are immutable; construction through the public factories
// enforces negative mean. tilt() builds positive-drift instances through an
// internal path and marks them.
class ModelSpec {
  public:
    static ModelSpec two_point(double p, double a_up, double a_down);
    static ModelSpec gaussian(double mu, double sigma);
    static ModelSpec compound_poisson_drift(double c, double rho, double nu);
    static ModelSpec brownian_drift(double mu_abs, double sigma);

    ModelKind kind() const { return kind_; }
    bool is_walk() const {
        return kind_ == ModelKind::TwoPointWalk || kind_ == ModelKind::GaussianWalk;
    }
    bool is_levy() const { return !is_walk(); }
    bool tilted() const { return tilted_; }

    // log E e^{theta X_1}, per step or per unit time. Throws DomainBoundary
    // for theta outside [0, theta_max).
    double cumulant(double theta) const;
    double cumulant_derivative(double theta) const;
    double theta_max() const;

    double mean() const;
    double lattice_span() const { return span_; }
    std::pair<double, double> mean_and_span() const { return {mean(), span_}; }

    // Exponentially tilted (associated) law: kappa_tilt(theta) =
    // kappa(theta + gamma) - kappa(gamma). tilt() requires gamma to be the
    // Cramer root; tilt_unchecked() only checks the domain.
    ModelSpec tilt(double gamma) const;
    ModelSpec tilt_unchecked(double gamma) const;

    // n i.i.d. steps (walk kinds only; UnsupportedKind otherwise).
    std::vector<double> sample(Stream& stream, std::size_t n) const;
    double sample_step(Stream& stream) const;

    const TwoPointParams& two_point_params() const;
    const GaussianParams& gaussian_params() const;
    const CompoundPoissonParams& compound_poisson_params() const;
    const BrownianParams& brownian_params() const;

    std::string describe() const;

  private:
    ModelSpec() = default;
    void validate_params() const;

    ModelKind kind_ = ModelKind::TwoPointWalk;
    TwoPointParams tp_{};
    GaussianParams ga_{};
    CompoundPoissonParams cp_{};
    BrownianParams br_{};
    double span_ = 0.0;
    bool tilted_ = false;
};

// Largest d with both magnitudes integer multiples, for rational
// a_up/a_down with denominator <= 10^6; 0 otherwise.
double detect_lattice_span(double a_up, double a_down);

}  // namespace reflev
