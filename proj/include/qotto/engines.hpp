// engines.hpp: working-medium parameter models, thermal occupations and
// macroscopic efficiencies for the Otto-cycle engines.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qotto {

// Thrown when a requested spectrum truncation cannot reach the tail tolerance.
class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& what, double achieved_tail, std::size_t required_levels)
        : std::runtime_error(what), achieved_tail_(achieved_tail), required_levels_(required_levels) {}

    double achieved_tail() const noexcept { return achieved_tail_; }
    std::size_t required_levels() const noexcept { return required_levels_; }

private:
    double achieved_tail_;
    std::size_t required_levels_;
};

// Inverse temperatures of the two reservoirs, beta_c > beta_h > 0.
struct BathPair {
    double beta_c{0.0};
    double beta_h{0.0};

    BathPair(double bc, double bh) : beta_c(bc), beta_h(bh) {
        if (!(bc > bh) || !(bh > 0.0)) {
            throw std::invalid_argument("BathPair: need beta_c > beta_h > 0");
        }
    }

    // Carnot efficiency 1 - beta_h/beta_c.
    double eta_carnot() const noexcept { return 1.0 - beta_h / beta_c; }
};

// Two-level medium with eigenvalues -nu, +nu (gap 2*nu) at each end of the
// stroke and no-transition probability u shared by expansion and compression.
struct TwoLevelEngine {
    double nu0{0.0};
    double nu_tau{0.0};
    double u{1.0};

    TwoLevelEngine(double nu0_, double nu_tau_, double u_) : nu0(nu0_), nu_tau(nu_tau_), u(u_) {
        if (!(nu_tau_ > nu0_) || !(nu0_ > 0.0)) {
            throw std::invalid_argument("TwoLevelEngine: need nu_tau > nu0 > 0");
        }
        if (!(u_ >= 0.0 && u_ <= 1.0)) {
            throw std::invalid_argument("TwoLevelEngine: need 0 <= u <= 1");
        }
    }

    // Adiabaticity parameter 2u - 1, in [-1, 1].
    double q_star() const noexcept { return 2.0 * u - 1.0; }

    double eps_tau_sq() const noexcept { return nu0 / nu_tau; }
};

// Harmonic medium with frequencies omega0 -> omega_tau and adiabaticity
// parameter q_star >= 1 (1 = adiabatic driving). q_star is an input knob:
// the frequency protocol that produces it is outside this model.
struct HarmonicEngine {
    double omega0{0.0};
    double omega_tau{0.0};
    double q_star{1.0};

    HarmonicEngine(double w0, double wt, double q) : omega0(w0), omega_tau(wt), q_star(q) {
        if (!(wt > w0) || !(w0 > 0.0)) {
            throw std::invalid_argument("HarmonicEngine: need omega_tau > omega0 > 0");
        }
        if (!(q >= 1.0)) {
            throw std::invalid_argument("HarmonicEngine: need q_star >= 1");
        }
    }

    double eps_tau_sq() const noexcept { return omega0 / omega_tau; }
};

// Finite truncation of a scale-invariant spectrum E_j^tau = E_j^0 / eps_tau_sq,
// driven adiabatically.
struct ScaleInvariantEngine {
    std::vector<double> spectrum;  // bare eigenvalues, strictly increasing
    double eps_tau_sq{0.0};

    ScaleInvariantEngine(std::vector<double> levels, double eps_sq)
        : spectrum(std::move(levels)), eps_tau_sq(eps_sq) {
        if (spectrum.size() < 2) {
            throw std::invalid_argument("ScaleInvariantEngine: need at least two levels");
        }
        for (std::size_t i = 1; i < spectrum.size(); ++i) {
            if (!(spectrum[i] > spectrum[i - 1])) {
                throw std::invalid_argument("ScaleInvariantEngine: spectrum must be strictly increasing");
            }
        }
        if (!(eps_sq > 0.0 && eps_sq < 1.0)) {
            throw std::invalid_argument("ScaleInvariantEngine: need 0 < eps_tau_sq < 1");
        }
    }

    std::vector<double> scaled_spectrum() const {
        std::vector<double> s(spectrum);
        for (double& e : s) e /= eps_tau_sq;
        return s;
    }
};

// No-transition probability u = cos^2(I) of the driven two-level system,
// I = -(lambda1 + lambda2) * tau / 2 for the linear amplitude ramp.
double tls_no_transition_prob(double lambda1, double lambda2, double tau);

// Normalized Gibbs occupations over a finite level set.
std::vector<double> gibbs_weights(const std::vector<double>& levels, double beta);

// Occupations of the cold bath on the bare levels and the hot bath on the
// scaled levels. For the harmonic engine the truncation n_levels must keep
// both Gibbs tails below tail_tol (throws truncation_error with the required
// count otherwise); pass n_levels = 0 to size it adaptively (minimum 64).
std::pair<std::vector<double>, std::vector<double>>
thermal_weights(const TwoLevelEngine& engine, const BathPair& baths);

std::pair<std::vector<double>, std::vector<double>>
thermal_weights(const HarmonicEngine& engine, const BathPair& baths,
                std::size_t n_levels = 0, double tail_tol = 1e-12);

std::pair<std::vector<double>, std::vector<double>>
thermal_weights(const ScaleInvariantEngine& engine, const BathPair& baths);

// Number of harmonic levels needed to keep the worse Gibbs tail below tail_tol.
std::size_t harmonic_levels_for_tail(const HarmonicEngine& engine, const BathPair& baths,
                                     double tail_tol = 1e-12);

// (eta_th adiabatic, eta_carnot): 1 - eps_tau^2 and 1 - beta_h/beta_c.
std::pair<double, double> macroscopic_efficiencies(const TwoLevelEngine& engine, const BathPair& baths);
std::pair<double, double> macroscopic_efficiencies(const HarmonicEngine& engine, const BathPair& baths);
std::pair<double, double> macroscopic_efficiencies(const ScaleInvariantEngine& engine, const BathPair& baths);

}  // namespace qotto
