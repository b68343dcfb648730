// ldf.hpp: efficiency large-deviation functions. Primary route minimizes the
// CGF along gamma1 = eta*gamma2; the cross-check route goes through the 2-D
// Legendre-Fenchel transform and contraction. Also contour grids and the
// adiabatic degeneracy test.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qotto/cgf.hpp"

namespace qotto {

enum class RateStatus {
    converged,
    diverged_to_minus_infinity,
    boundary_limited,
};

const char* to_string(RateStatus status);

struct RateFunctionPoint {
    double eta{0.0};
    double j{0.0};  // +infinity when status is diverged_to_minus_infinity
    std::optional<double> argmin_gamma2;
    RateStatus status{RateStatus::converged};
};

struct SearchConfig {
    double gamma_max{0.0};   // 0: use 50 / min-quantum of the CGF
    double j_max{1e3};       // f below -j_max counts as divergence to -infinity
    double golden_tol{1e-10};
    int threads{1};
    // Set when the CGF is degenerate along slope eta_th: the rate function is
    // then the deterministic plateau (0 within eta_window of eta_th, +infinity
    // elsewhere) instead of the line minimization, whose minimum stays finite
    // and misses the support collapse.
    std::optional<double> degenerate_eta_th;
    double eta_window{1e-3};
};

struct RateFunctionCurve {
    std::vector<RateFunctionPoint> points;
    double eta_th{0.0};  // macroscopic efficiency -<W>/<Q2>
    double eta_ca{0.0};
    bool degenerate{false};
};

struct ContourGrid {
    std::vector<double> gamma1_axis;
    std::vector<double> gamma2_axis;
    std::vector<CgfValue> values;  // row-major: [i1 * gamma2_axis.size() + i2]

    const CgfValue& at(std::size_t i1, std::size_t i2) const {
        return values[i1 * gamma2_axis.size() + i2];
    }
};

struct ContourBounds {
    double g1_min, g1_max;
    double g2_min, g2_max;
};

struct LegendreGrid {
    std::vector<double> q_axis;
    std::vector<double> w_axis;
    std::vector<double> values;       // row-major: [iq * w_axis.size() + iw]
    std::vector<std::uint8_t> flags;  // 1 = converged

    double at(std::size_t iq, std::size_t iw) const { return values[iq * w_axis.size() + iw]; }
};

struct LegendreConfig {
    int starts_per_axis{5};
    double start_box{0.0};  // 0: 2 / min-quantum
    double gamma_box{0.0};  // 0: 50 / min-quantum; ascent iterates are confined to it
    int max_iterations{400};
    double grad_tol{1e-11};
};

// J(eta) = -min_{gamma2} phi(eta*gamma2, gamma2): coarse logarithmic scan over
// [-Gamma, Gamma] followed by golden-section refinement.
RateFunctionPoint rate_function(const Cgf& cgf, double eta, const SearchConfig& config = {});

// Per-point rate_function over the grid. Runs degeneracy_check(cgf, eta_th)
// first and switches to the deterministic plateau when it holds.
RateFunctionCurve rate_curve(const Cgf& cgf, const std::vector<double>& eta_grid,
                             const SearchConfig& config, double eta_th, double eta_ca);

// Legendre-Fenchel conjugate I(q, w) = sup_gamma [g1 q + g2 w - phi] by
// multi-start gradient ascent with Newton polish.
LegendreGrid legendre_2d(const Cgf& cgf, const std::vector<double>& q_grid,
                         const std::vector<double>& w_grid, const LegendreConfig& config = {});

// One conjugate value; exposed for the contraction route and cell oracles.
struct LegendrePoint {
    double value{0.0};
    double g1{0.0}, g2{0.0};
    bool converged{false};
};
LegendrePoint legendre_point(const Cgf& cgf, double q, double w, const LegendreConfig& config = {});

// Contraction route: min over q of I(q, -eta*q).
double rate_function_contraction(const Cgf& cgf, double eta, const LegendreConfig& config = {});

ContourGrid contour_grid(const Cgf& cgf, const ContourBounds& bounds,
                         std::size_t n1, std::size_t n2, int threads = 1);

// True iff phi(g1 + eta_th*d, g2 + d) == phi(g1, g2) within tolerance over a
// deterministic sample of in-domain pairs.
bool degeneracy_check(const Cgf& cgf, double eta_th, double tolerance = 1e-10);

}  // namespace qotto
