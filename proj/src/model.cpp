#include "reflev/model.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "reflev/errors.hpp"

namespace reflev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |kappa(gamma)| tolerance for accepting gamma as a root, scaled to the
// local slope so it tracks the precision of gamma itself.
double root_residual_gate(double gamma, double slope) {
    return 1e-9 * (1.0 + std::abs(slope) * std::abs(gamma));
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::TwoPointWalk: return "TwoPointWalk";
        case ModelKind::GaussianWalk: return "GaussianWalk";
        case ModelKind::CompoundPoissonDrift: return "CompoundPoissonDrift";
        case ModelKind::BrownianDrift: return "BrownianDrift";
    }
    return "?";
}

double detect_lattice_span(double a_up, double a_down) {
    // Best rational approximation of a_up/a_down by continued fractions,
    // denominator capped at 10^6. Doubles that encode a true rational ratio
    // land within ~2 ulp, so the 4e-16 gate separates genuine lattices from
    // incidental good approximations (pi's best convergent under the
    // denominator cap sits at 5e-13 relative).
    const double ratio = a_up / a_down;
    double x = ratio;
    std::uint64_t p_prev = 0, q_prev = 1;  // h_{-2}/k_{-2}
    std::uint64_t p_cur = 1, q_cur = 0;    // h_{-1}/k_{-1}
    for (int iter = 0; iter < 64; ++iter) {
        const double fl = std::floor(x);
        if (fl > 2e6) break;
        const auto a = static_cast<std::uint64_t>(fl);
        const std::uint64_t p_next = a * p_cur + p_prev;
        const std::uint64_t q_next = a * q_cur + q_prev;
        if (q_next > 1000000ull) break;
        p_prev = p_cur; q_prev = q_cur;
        p_cur = p_next; q_cur = q_next;
        const double approx = static_cast<double>(p_cur) / static_cast<double>(q_cur);
        if (std::abs(approx - ratio) <= 4e-16 * ratio) {
            return a_down / static_cast<double>(q_cur);
        }
        const double frac = x - fl;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
    return 0.0;
}

ModelSpec ModelSpec::two_point(double p, double a_up, double a_down) {
    if (!(p > 0.0 && p < 1.0) || !(a_up > 0.0) || !(a_down > 0.0)) {
        throw_error(ErrorCode::InvalidParameter,
                    "TwoPointWalk requires p in (0,1) and positive step magnitudes");
    }
    ModelSpec m;
    m.kind_ = ModelKind::TwoPointWalk;
    m.tp_ = {p, a_up, a_down};
    m.span_ = detect_lattice_span(a_up, a_down);
    m.validate_params();
    return m;
}

ModelSpec ModelSpec::gaussian(double mu, double sigma) {
    if (!(sigma > 0.0)) {
        throw_error(ErrorCode::InvalidParameter, "GaussianWalk requires sigma > 0");
    }
    ModelSpec m;
    m.kind_ = ModelKind::GaussianWalk;
    m.ga_ = {mu, sigma};
    m.validate_params();
    return m;
}

ModelSpec ModelSpec::compound_poisson_drift(double c, double rho, double nu) {
    // rho = 0 (pure down-drift) is admitted so the NoPositiveRoot path of the
    // root solver is reachable.
    if (!(c > 0.0) || !(rho >= 0.0) || !(nu > 0.0)) {
        throw_error(ErrorCode::InvalidParameter,
                    "CompoundPoissonDrift requires c > 0, rho >= 0, nu > 0");
    }
    ModelSpec m;
    m.kind_ = ModelKind::CompoundPoissonDrift;
    m.cp_ = {c, rho, nu};
    m.validate_params();
    return m;
}

ModelSpec ModelSpec::brownian_drift(double mu_abs, double sigma) {
    if (!(mu_abs > 0.0) || !(sigma > 0.0)) {
        throw_error(ErrorCode::InvalidParameter,
                    "BrownianDrift requires mu_abs > 0 and sigma > 0");
    }
    ModelSpec m;
    m.kind_ = ModelKind::BrownianDrift;
    m.br_ = {-mu_abs, sigma};
    m.validate_params();
    return m;
}

void ModelSpec::validate_params() const {
    if (!(mean() < 0.0)) {
        throw_error(ErrorCode::NonNegativeMean,
                    std::string(model_kind_name(kind_)) + " has mean >= 0");
    }
}

double ModelSpec::theta_max() const {
    return kind_ == ModelKind::CompoundPoissonDrift ? cp_.nu : kInf;
}

double ModelSpec::cumulant(double theta) const {
    if (!(theta >= 0.0) || theta >= theta_max()) {
        throw_error(ErrorCode::DomainBoundary, "theta outside [0, theta_max)");
    }
    switch (kind_) {
        case ModelKind::TwoPointWalk: {
            const double q = 1.0 - tp_.p;
            // log(p e^{th a_up} + q e^{-th a_down}) in overflow-safe form
            return theta * tp_.a_up +
                   std::log(tp_.p + q * std::exp(-theta * (tp_.a_up + tp_.a_down)));
        }
        case ModelKind::GaussianWalk:
            return ga_.mu * theta + 0.5 * ga_.sigma * ga_.sigma * theta * theta;
        case ModelKind::CompoundPoissonDrift:
            return -cp_.c * theta + cp_.rho * theta / (cp_.nu - theta);
        case ModelKind::BrownianDrift:
            return br_.drift * theta + 0.5 * br_.sigma * br_.sigma * theta * theta;
    }
    return 0.0;
}

double ModelSpec::cumulant_derivative(double theta) const {
    if (!(theta >= 0.0) || theta >= theta_max()) {
        throw_error(ErrorCode::DomainBoundary, "theta outside [0, theta_max)");
    }
    switch (kind_) {
        case ModelKind::TwoPointWalk: {
            const double q = 1.0 - tp_.p;
            const double e = std::exp(-theta * (tp_.a_up + tp_.a_down));
            return (tp_.p * tp_.a_up - q * tp_.a_down * e) / (tp_.p + q * e);
        }
        case ModelKind::GaussianWalk:
            return ga_.mu + ga_.sigma * ga_.sigma * theta;
        case ModelKind::CompoundPoissonDrift: {
            const double d = cp_.nu - theta;
            return -cp_.c + cp_.rho * cp_.nu / (d * d);
        }
        case ModelKind::BrownianDrift:
            return br_.drift + br_.sigma * br_.sigma * theta;
    }
    return 0.0;
}

double ModelSpec::mean() const {
    switch (kind_) {
        case ModelKind::TwoPointWalk:
            return tp_.p * tp_.a_up - (1.0 - tp_.p) * tp_.a_down;
        case ModelKind::GaussianWalk:
            return ga_.mu;
        case ModelKind::CompoundPoissonDrift:
            return -cp_.c + cp_.rho / cp_.nu;
        case ModelKind::BrownianDrift:
            return br_.drift;
    }
    return 0.0;
}

ModelSpec ModelSpec::tilt_unchecked(double gamma) const {
    if (!(gamma > 0.0) || gamma >= theta_max()) {
        throw_error(ErrorCode::DomainBoundary, "tilt parameter outside (0, theta_max)");
    }
    ModelSpec out = *this;
    out.tilted_ = true;
    switch (kind_) {
        case ModelKind::TwoPointWalk: {
            const double q = 1.0 - tp_.p;
            const double up = tp_.p * std::exp(gamma * tp_.a_up);
            const double down = q * std::exp(-gamma * tp_.a_down);
            out.tp_.p = up / (up + down);
            break;
        }
        case ModelKind::GaussianWalk:
            out.ga_.mu = ga_.mu + gamma * ga_.sigma * ga_.sigma;
            break;
        case ModelKind::CompoundPoissonDrift:
            out.cp_.rho = cp_.rho * cp_.nu / (cp_.nu - gamma);
            out.cp_.nu = cp_.nu - gamma;
            break;
        case ModelKind::BrownianDrift:
            out.br_.drift = br_.drift + gamma * br_.sigma * br_.sigma;
            break;
    }
    return out;
}

ModelSpec ModelSpec::tilt(double gamma) const {
    if (!(gamma > 0.0) || gamma >= theta_max()) {
        throw_error(ErrorCode::DomainBoundary, "tilt parameter outside (0, theta_max)");
    }
    const double residual = cumulant(gamma);
    if (std::abs(residual) > root_residual_gate(gamma, cumulant_derivative(gamma))) {
        throw_error(ErrorCode::NotARoot, "kappa(gamma) != 0 within tolerance");
    }
    return tilt_unchecked(gamma);
}

double ModelSpec::sample_step(Stream& stream) const {
    switch (kind_) {
        case ModelKind::TwoPointWalk:
            return stream.uniform_open() < tp_.p ? tp_.a_up : -tp_.a_down;
        case ModelKind::GaussianWalk:
            return ga_.mu + ga_.sigma * stream.normal();
        default:
            throw_error(ErrorCode::UnsupportedKind,
                        "step sampling is for walk kinds; use cpd_sim for Levy kinds");
    }
}

std::vector<double> ModelSpec::sample(Stream& stream, std::size_t n) const {
    if (!is_walk()) {
        throw_error(ErrorCode::UnsupportedKind,
                    "step sampling is for walk kinds; use cpd_sim for Levy kinds");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_step(stream);
    return out;
}

const TwoPointParams& ModelSpec::two_point_params() const {
    if (kind_ != ModelKind::TwoPointWalk)
        throw_error(ErrorCode::UnsupportedKind, "not a TwoPointWalk");
    return tp_;
}

const GaussianParams& ModelSpec::gaussian_params() const {
    if (kind_ != ModelKind::GaussianWalk)
        throw_error(ErrorCode::UnsupportedKind, "not a GaussianWalk");
    return ga_;
}

const CompoundPoissonParams& ModelSpec::compound_poisson_params() const {
    if (kind_ != ModelKind::CompoundPoissonDrift)
        throw_error(ErrorCode::UnsupportedKind, "not a CompoundPoissonDrift");
    return cp_;
}

const BrownianParams& ModelSpec::brownian_params() const {
    if (kind_ != ModelKind::BrownianDrift)
        throw_error(ErrorCode::UnsupportedKind, "not a BrownianDrift");
    return br_;
}

std::string ModelSpec::describe() const {
    std::ostringstream os;
    os << model_kind_name(kind_) << "(";
    switch (kind_) {
        case ModelKind::TwoPointWalk:
            os << "p=" << tp_.p << ", a_up=" << tp_.a_up << ", a_down=" << tp_.a_down;
            break;
        case ModelKind::GaussianWalk:
            os << "mu=" << ga_.mu << ", sigma=" << ga_.sigma;
            break;
        case ModelKind::CompoundPoissonDrift:
            os << "c=" << cp_.c << ", rho=" << cp_.rho << ", nu=" << cp_.nu;
            break;
        case ModelKind::BrownianDrift:
            os << "drift=" << br_.drift << ", sigma=" << br_.sigma;
            break;
    }
    if (tilted_) os << ", tilted";
    os << ")";
    return os.str();
}

}  // namespace reflev
