#pragma once

#include <cstddef>
#include <string>

#include "reflev/model.hpp"
#include "reflev/rng.hpp"

namespace reflev {

enum class EstimateMethod { ClosedForm, MonteCarlo };

struct EstimateWithCI {
    double value = 0.0;
    double stderr_ = 0.0;  // 0 iff closed form
    std::size_t n = 0;
    EstimateMethod method = EstimateMethod::ClosedForm;

    static EstimateWithCI closed_form(double v) { return {v, 0.0, 0, EstimateMethod::ClosedForm}; }
    static EstimateWithCI monte_carlo(double v, double se, std::size_t n) {
        return {v, se, n, EstimateMethod::MonteCarlo};
    }
};

// Random-walk limit constants: e^{gamma x} P(M_inf > x) -> C and
// e^{gamma x} P(h_1 > x) -> K = C (1 - E e^{-gamma H_1}), alpha = E T_1.
struct RwConstants {
    double gamma = 0.0;
    EstimateWithCI C;
    EstimateWithCI K;
    EstimateWithCI alpha;
    EstimateWithCI ladder_transform;  // E e^{-gamma H_1}
    double span = 0.0;
    bool lattice_corrected = false;
    double censored_fraction = 0.0;
};

// Levy limit constants under the fixed normalization L = -I (both supported
// kinds creep downward, so the descending ladder height is unit drift and
// phi(theta) = theta).
struct LevyConstants {
    double gamma = 0.0;
    double beta = 0.0;          // killing rate of the ascending ladder process
    double m = 0.0;             // E(H_1^+ e^{gamma H_1^+}; H_1^+ < inf)
    double phi_at_gamma = 0.0;  // = gamma
    double C_star = 0.0;        // = beta / (gamma m), exact field relation
    double K_star = 0.0;        // = phi_at_gamma * C_star
    double alpha_star = 0.0;    // E L_1^{-1}
    std::string normalization = "L = -I";
    bool pair_is_canonical = true;  // (beta, m) individually identified
};

// Tilted-ladder Monte Carlo route (closed forms where available). The
// default budget splits 50/25/25 across the tilted ascending sample, the
// first-ladder sample and the alpha sample.
RwConstants rw_constants(const ModelSpec& model, double gamma, std::size_t budget,
                         Stream stream, int workers = 1);

LevyConstants levy_constants(const ModelSpec& model, double gamma);

// Closed-form excursion-height tail for Brownian motion with drift under
// L = -I: eta_bar(x) = gamma / (e^{gamma x} - 1).
double eta_bar_bm(double gamma, double x);

// 1 for d = 0, else gamma d e^{-gamma d} / (1 - e^{-gamma d}): the factor by
// which the lattice limit of e^{gamma x} P(. > x) along x in dZ differs from
// the nonlattice constant.
double lattice_correction(double gamma, double d);

// Evaluates both sides of the first-excursion identity
// P(M_inf > k) = P(h_1 > k) + sum_y P(h_1 <= k, H_1 = y) P(M_inf > k + y)
// for k = 0..k_max with the exact TwoPointWalk(a_up=a_down) formulas;
// returns the largest absolute residual.
double iglehart_identity_check(const ModelSpec& model, std::size_t k_max);

// Exact TwoPointWalk(a_up = a_down) formulas shared by the closed-form
// constants path and the identity check.
namespace two_point_exact {
// P(M_inf > k a) = r^{k+1} with r = p/q
double max_tail(double p, std::size_t k);
// P(h_1 >= k a) = (q/p - 1) / ((q/p)^{k+1} - 1)
double excursion_height_geq(double p, std::size_t k);
double excursion_height_gt(double p, std::size_t k);
}  // namespace two_point_exact

}  // namespace reflev
