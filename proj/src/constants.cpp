#include "reflev/constants.hpp"

#include <cmath>

#include "reflev/errors.hpp"
#include "reflev/walk_engine.hpp"

namespace reflev {

namespace {

struct MeanVar {
    double mean = 0.0;
    double var_of_mean = 0.0;  // sample variance / n
    std::size_t n = 0;
};

MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar out;
    out.n = xs.size();
    if (xs.empty()) return out;
    double s = 0.0;
    for (double x : xs) s += x;
    out.mean = s / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - out.mean;
        ss += d * d;
    }
    if (xs.size() > 1)
        out.var_of_mean = ss / (static_cast<double>(xs.size() - 1) * static_cast<double>(xs.size()));
    return out;
}

double covariance_of_means(const std::vector<double>& xs, const std::vector<double>& ys,
                           double mx, double my) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (xs[i] - mx) * (ys[i] - my);
    return s / (static_cast<double>(xs.size() - 1) * static_cast<double>(xs.size()));
}

}  // namespace

double eta_bar_bm(double gamma, double x) {
    if (!(gamma > 0.0) || !(x > 0.0))
        throw_error(ErrorCode::NonPositiveInput, "eta_bar_bm needs gamma > 0 and x > 0");
    return gamma / std::expm1(gamma * x);
}

double lattice_correction(double gamma, double d) {
    if (!(gamma > 0.0) || !(d >= 0.0))
        throw_error(ErrorCode::InvalidParameter, "lattice_correction needs gamma > 0, d >= 0");
    if (d == 0.0) return 1.0;
    return gamma * d / std::expm1(gamma * d);
}

namespace two_point_exact {

double max_tail(double p, std::size_t k) {
    const double r = p / (1.0 - p);
    return std::pow(r, static_cast<double>(k + 1));
}

double excursion_height_geq(double p, std::size_t k) {
    if (k == 0) return 1.0;
    const double rho = (1.0 - p) / p;  // > 1 under negative mean
    return (rho - 1.0) / (std::pow(rho, static_cast<double>(k + 1)) - 1.0);
}

double excursion_height_gt(double p, std::size_t k) {
    return excursion_height_geq(p, k + 1);
}

}  // namespace two_point_exact

RwConstants rw_constants(const ModelSpec& model, double gamma, std::size_t budget,
                         Stream stream, int workers) {
    if (!model.is_walk())
        throw_error(ErrorCode::UnsupportedKind, "rw_constants is for walk kinds");
    if (!(model.mean() < 0.0))
        throw_error(ErrorCode::NonNegativeMean, "rw_constants requires mean < 0");
    if (budget < 1000)
        throw_error(ErrorCode::InvalidParameter, "budget must be >= 1e3");

    RwConstants out;
    out.gamma = gamma;
    out.span = model.lattice_span();

    if (model.kind() == ModelKind::TwoPointWalk) {
        const auto& tp = model.two_point_params();
        if (tp.a_up == tp.a_down) {
            // Skip-free lattice walk: M_inf is geometric, H_1 is one lattice
            // unit, and Wald gives alpha = a / |mean|.
            const double q = 1.0 - tp.p;
            const double r = tp.p / q;
            out.C = EstimateWithCI::closed_form(r);
            out.ladder_transform = EstimateWithCI::closed_form(r);  // e^{-gamma a} = p/q
            out.K = EstimateWithCI::closed_form(r * (1.0 - r));
            out.alpha = EstimateWithCI::closed_form(tp.a_down / -model.mean());
            out.lattice_corrected = true;  // the geometric law IS the lattice limit
            return out;
        }
    }

    const std::size_t reps_tilt = budget / 2;
    const std::size_t reps_ladder = budget / 4;
    const std::size_t reps_alpha = budget - reps_tilt - reps_ladder;

    const TiltedLadderSample tilt_sample =
        sample_weak_ascending_tilted(model, gamma, stream.child("hplus"), reps_tilt, workers);
    const FirstLadderSample ladder_sample =
        sample_first_ladder(model, stream.child("ladder"), reps_ladder, kDefaultStepCap, workers);
    const FirstLadderSample alpha_sample =
        sample_first_ladder(model, stream.child("alpha"), reps_alpha, kDefaultStepCap, workers);

    // C = P(H_1^+ = inf) / (gamma m): the defective renewal equation for
    // P(M_inf > x) has z-integral (1/gamma)(1 - P(H_1^+ < inf)), and the
    // tilted sample estimates P(H_1^+ < inf) = E_tilt e^{-gamma H^+} and
    // m = E_tilt H^+.
    const MeanVar w = mean_var(tilt_sample.weights);
    const MeanVar hp = mean_var(tilt_sample.h_plus);
    const double cov_wh =
        covariance_of_means(tilt_sample.weights, tilt_sample.h_plus, w.mean, hp.mean);
    const double c_raw = (1.0 - w.mean) / (gamma * hp.mean);
    const double dW = -1.0 / (gamma * hp.mean);
    const double dM = -(1.0 - w.mean) / (gamma * hp.mean * hp.mean);
    double var_c = dW * dW * w.var_of_mean + dM * dM * hp.var_of_mean +
                   2.0 * dW * dM * cov_wh;
    var_c = std::max(var_c, 0.0);

    double c_value = c_raw;
    double c_se = std::sqrt(var_c);
    if (out.span > 0.0) {
        const double factor = lattice_correction(gamma, out.span);
        c_value *= factor;
        c_se *= factor;
        out.lattice_corrected = true;
    }
    out.C = EstimateWithCI::monte_carlo(c_value, c_se, tilt_sample.h_plus.size());

    std::vector<double> transforms(ladder_sample.heights.size());
    for (std::size_t i = 0; i < transforms.size(); ++i)
        transforms[i] = std::exp(-gamma * ladder_sample.heights[i]);
    const MeanVar e = mean_var(transforms);
    out.ladder_transform = EstimateWithCI::monte_carlo(e.mean, std::sqrt(e.var_of_mean), e.n);

    const double k_value = c_value * (1.0 - e.mean);
    const double var_k = (1.0 - e.mean) * (1.0 - e.mean) * c_se * c_se +
                         c_value * c_value * e.var_of_mean;
    out.K = EstimateWithCI::monte_carlo(k_value, std::sqrt(var_k),
                                        std::min(e.n, tilt_sample.h_plus.size()));

    std::vector<double> epochs(alpha_sample.epochs.size());
    for (std::size_t i = 0; i < epochs.size(); ++i)
        epochs[i] = static_cast<double>(alpha_sample.epochs[i]);
    const MeanVar a = mean_var(epochs);
    out.alpha = EstimateWithCI::monte_carlo(a.mean, std::sqrt(a.var_of_mean), a.n);

    out.censored_fraction =
        std::max(ladder_sample.censored_fraction(), alpha_sample.censored_fraction());
    return out;
}

LevyConstants levy_constants(const ModelSpec& model, double gamma) {
    if (!model.is_levy())
        throw_error(ErrorCode::UnsupportedKind, "levy_constants is for Levy kinds");
    const double residual = model.cumulant(gamma);
    const double slope = model.cumulant_derivative(gamma);
    if (std::abs(residual) > 1e-9 * (1.0 + std::abs(slope) * gamma))
        throw_error(ErrorCode::NotARoot, "kappa(gamma) != 0 within tolerance");

    LevyConstants out;
    out.gamma = gamma;
    out.phi_at_gamma = gamma;  // descending ladder height is unit drift under L = -I

    // Wiener-Hopf with the descending factor pinned to phi(theta) = theta:
    // kappa(theta) = theta * (-k_plus(-theta)) identifies the ascending
    // exponent k_plus, hence beta = k_plus(0) and m = k_plus'(-gamma).
    switch (model.kind()) {
        case ModelKind::BrownianDrift: {
            const auto& p = model.brownian_params();
            const double mu = -p.drift;
            out.beta = mu;
            out.m = 0.5 * p.sigma * p.sigma;
            out.alpha_star = 1.0 / mu;
            break;
        }
        case ModelKind::CompoundPoissonDrift: {
            const auto& p = model.compound_poisson_params();
            if (p.rho <= 0.0)
                throw_error(ErrorCode::NoPositiveRoot,
                            "pure down-drift admits no Cramer root");
            out.beta = p.c - p.rho / p.nu;
            out.m = p.c * p.c / p.rho;
            out.alpha_star = 1.0 / (p.c - p.rho / p.nu);
            break;
        }
        default:
            throw_error(ErrorCode::UnsupportedKind, "unsupported Levy kind");
    }
    out.C_star = out.beta / (gamma * out.m);
    out.K_star = out.phi_at_gamma * out.C_star;
    return out;
}

double iglehart_identity_check(const ModelSpec& model, std::size_t k_max) {
    if (model.kind() != ModelKind::TwoPointWalk)
        throw_error(ErrorCode::UnsupportedModel, "identity check needs a TwoPointWalk");
    const auto& tp = model.two_point_params();
    if (tp.a_up != tp.a_down)
        throw_error(ErrorCode::UnsupportedModel, "identity check needs a_up == a_down");

    using namespace two_point_exact;
    double worst = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) {
        const double lhs = max_tail(tp.p, k);
        // H_1 is one lattice unit, so the convolution collapses to a single term.
        const double rhs = excursion_height_gt(tp.p, k) +
                           (1.0 - excursion_height_gt(tp.p, k)) * max_tail(tp.p, k + 1);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace reflev
