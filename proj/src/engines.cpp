#include "qotto/engines.hpp"

#include <algorithm>
#include <cmath>

namespace qotto {

double tls_no_transition_prob(double lambda1, double lambda2, double tau) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("tls_no_transition_prob: need tau > 0");
    }
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw std::invalid_argument("tls_no_transition_prob: need lambda1, lambda2 >= 0");
    }
    const double integral = -(lambda1 + lambda2) * tau / 2.0;  // I = -int_0^tau lambda(t) dt
    const double c = std::cos(integral);
    return c * c;
}

std::vector<double> gibbs_weights(const std::vector<double>& levels, double beta) {
    if (levels.empty()) {
        throw std::invalid_argument("gibbs_weights: empty level set");
    }
    // Shift by the ground level before exponentiating; the shift cancels in
    // the normalization.
    const double e0 = *std::min_element(levels.begin(), levels.end());
    std::vector<double> w(levels.size());
    double z = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        w[i] = std::exp(-beta * (levels[i] - e0));
        z += w[i];
    }
    for (double& x : w) x /= z;
    return w;
}

std::pair<std::vector<double>, std::vector<double>>
thermal_weights(const TwoLevelEngine& engine, const BathPair& baths) {
    return {gibbs_weights({-engine.nu0, engine.nu0}, baths.beta_c),
            gibbs_weights({-engine.nu_tau, engine.nu_tau}, baths.beta_h)};
}

std::size_t harmonic_levels_for_tail(const HarmonicEngine& engine, const BathPair& baths,
                                     double tail_tol) {
    // Normalized geometric tail beyond N levels is r^N with r = exp(-beta*omega);
    // the hot bath on the scaled spectrum has the slower decay when
    // beta_h*omega_tau < beta_c*omega0.
    const double decay = std::min(baths.beta_c * engine.omega0, baths.beta_h * engine.omega_tau);
    const std::size_t n = static_cast<std::size_t>(std::ceil(-std::log(tail_tol) / decay)) + 1;
    return std::max<std::size_t>(64, n);
}

std::pair<std::vector<double>, std::vector<double>>
thermal_weights(const HarmonicEngine& engine, const BathPair& baths,
                std::size_t n_levels, double tail_tol) {
    const std::size_t required = harmonic_levels_for_tail(engine, baths, tail_tol);
    if (n_levels == 0) {
        n_levels = required;
    } else {
        const double decay = std::min(baths.beta_c * engine.omega0, baths.beta_h * engine.omega_tau);
        const double tail = std::exp(-decay * static_cast<double>(n_levels));
        if (tail > tail_tol) {
            throw truncation_error("thermal_weights: truncation too small for tail tolerance",
                                   tail, required);
        }
    }
    std::vector<double> cold_levels(n_levels), hot_levels(n_levels);
    for (std::size_t n = 0; n < n_levels; ++n) {
        cold_levels[n] = engine.omega0 * (static_cast<double>(n) + 0.5);
        hot_levels[n] = engine.omega_tau * (static_cast<double>(n) + 0.5);
    }
    return {gibbs_weights(cold_levels, baths.beta_c), gibbs_weights(hot_levels, baths.beta_h)};
}

std::pair<std::vector<double>, std::vector<double>>
thermal_weights(const ScaleInvariantEngine& engine, const BathPair& baths) {
    return {gibbs_weights(engine.spectrum, baths.beta_c),
            gibbs_weights(engine.scaled_spectrum(), baths.beta_h)};
}

std::pair<double, double> macroscopic_efficiencies(const TwoLevelEngine& engine, const BathPair& baths) {
    return {1.0 - engine.eps_tau_sq(), baths.eta_carnot()};
}

std::pair<double, double> macroscopic_efficiencies(const HarmonicEngine& engine, const BathPair& baths) {
    return {1.0 - engine.eps_tau_sq(), baths.eta_carnot()};
}

std::pair<double, double> macroscopic_efficiencies(const ScaleInvariantEngine& engine, const BathPair& baths) {
    return {1.0 - engine.eps_tau_sq, baths.eta_carnot()};
}

}  // namespace qotto
