#include "qotto/ldf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qotto/parallel.hpp"

namespace qotto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gamma_bound(const Cgf& cgf, double configured) {
    if (configured > 0.0) return configured;
    return 50.0 / cgf.min_quantum();
}

struct LineFn {
    const Cgf& cgf;
    double eta;

    // +inf outside the convergence domain; minimization skips such points.
    double operator()(double g2) const {
        const CgfValue v = cgf(eta * g2, g2);
        return v.is_finite() ? v.value : kInf;
    }
};

}  // namespace

const char* to_string(RateStatus status) {
    switch (status) {
        case RateStatus::converged: return "converged";
        case RateStatus::diverged_to_minus_infinity: return "diverged-to-minus-infinity";
        case RateStatus::boundary_limited: return "boundary-limited";
    }
    return "unknown";
}

RateFunctionPoint rate_function(const Cgf& cgf, double eta, const SearchConfig& config) {
    // Degenerate (adiabatic) CGF: the joint support collapses onto
    // W = -eta_th Q2, the efficiency is deterministic, and the line
    // minimization cannot see it (its minimum stays finite for every eta).
    if (config.degenerate_eta_th) {
        if (std::abs(eta - *config.degenerate_eta_th) <= config.eta_window) {
            return {eta, 0.0, 0.0, RateStatus::converged};
        }
        return {eta, kInf, std::nullopt, RateStatus::diverged_to_minus_infinity};
    }

    const double gamma_max = gamma_bound(cgf, config.gamma_max);
    const LineFn f{cgf, eta};

    if (!cgf(0.0, 0.0).is_finite()) {
        throw std::logic_error("rate_function: CGF undefined at the origin (not normalized)");
    }

    // Coarse logarithmic scan, symmetric around 0.
    std::vector<double> xs;
    xs.push_back(0.0);
    for (int k = 0; k <= 60; ++k) {
        const double x = gamma_max * std::pow(2.0, -0.5 * k);
        xs.push_back(x);
        xs.push_back(-x);
    }
    std::sort(xs.begin(), xs.end());

    std::size_t best = 0;
    double best_f = kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fi = f(xs[i]);
        if (fi < best_f) {
            best_f = fi;
            best = i;
        }
        if (fi < -config.j_max) {
            return {eta, kInf, xs[i], RateStatus::diverged_to_minus_infinity};
        }
    }

    const bool at_edge = (best == 0) || (best + 1 == xs.size());
    double a = xs[best > 0 ? best - 1 : 0];
    double b = xs[std::min(best + 1, xs.size() - 1)];

    // Golden-section refinement; out-of-domain probes count as +inf, which
    // preserves unimodality of the convex line restriction.
    constexpr double R = 0.6180339887498949;
    constexpr double C = 1.0 - R;
    double x1 = a + C * (b - a);
    double x2 = a + R * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    double best_x = xs[best];
    while (b - a > config.golden_tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + C * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = f(x2);
        }
        const double fcur = std::min(f1, f2);
        if (fcur < best_f) {
            best_f = fcur;
            best_x = (f1 < f2) ? x1 : x2;
        }
        if (best_f < -config.j_max) {
            return {eta, kInf, best_x, RateStatus::diverged_to_minus_infinity};
        }
    }

    const double j = std::max(0.0, -best_f);
    return {eta, j, best_x, at_edge ? RateStatus::boundary_limited : RateStatus::converged};
}

RateFunctionCurve rate_curve(const Cgf& cgf, const std::vector<double>& eta_grid,
                             const SearchConfig& config, double eta_th, double eta_ca) {
    RateFunctionCurve curve;
    curve.eta_th = eta_th;
    curve.eta_ca = eta_ca;
    curve.degenerate = degeneracy_check(cgf, eta_th);

    SearchConfig point_config = config;
    if (curve.degenerate) {
        point_config.degenerate_eta_th = eta_th;
        // the grid point nearest eta_th must carry the root even on grids
        // coarser than the configured window
        double spacing = 0.0;
        for (std::size_t i = 1; i < eta_grid.size(); ++i) {
            spacing = std::max(spacing, std::abs(eta_grid[i] - eta_grid[i - 1]));
        }
        point_config.eta_window = std::max(config.eta_window, 0.5001 * spacing);
    }
    curve.points.resize(eta_grid.size());
    parallel_for(eta_grid.size(), config.threads, [&](std::size_t i) {
        curve.points[i] = rate_function(cgf, eta_grid[i], point_config);
    });
    return curve;
}

namespace {

struct Objective {
    const Cgf& cgf;
    double q, w;
    double box;

    double operator()(double g1, double g2) const {
        if (std::abs(g1) > box || std::abs(g2) > box) return -kInf;
        const CgfValue v = cgf(g1, g2);
        if (!v.is_finite()) return -kInf;
        return g1 * q + g2 * w - v.value;
    }
};

// Central-difference gradient with step shrinking near the domain boundary.
bool gradient(const Objective& h, double g1, double g2, double h0, double grad[2]) {
    const double base = 1e-6;
    for (int axis = 0; axis < 2; ++axis) {
        double step = base * (1.0 + std::abs(axis == 0 ? g1 : g2));
        bool ok = false;
        for (int k = 0; k < 30; ++k) {
            const double d1 = (axis == 0) ? step : 0.0;
            const double d2 = (axis == 1) ? step : 0.0;
            const double hp = h(g1 + d1, g2 + d2);
            const double hm = h(g1 - d1, g2 - d2);
            if (std::isfinite(hp) && std::isfinite(hm)) {
                grad[axis] = (hp - hm) / (2.0 * step);
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) {
            (void)h0;
            return false;
        }
    }
    return true;
}

LegendrePoint ascend(const Objective& h, double g1, double g2, const LegendreConfig& config) {
    double val = h(g1, g2);
    LegendrePoint out{val, g1, g2, false};
    if (!std::isfinite(val)) return out;

    double grad[2];
    for (int it = 0; it < config.max_iterations; ++it) {
        if (!gradient(h, g1, g2, val, grad)) break;
        const double gn = std::hypot(grad[0], grad[1]);
        if (gn < config.grad_tol * (1.0 + std::abs(val))) {
            out.converged = true;
            break;
        }
        // Backtracking line search along the gradient.
        double t = 1.0 / std::max(1.0, gn);
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            const double n1 = g1 + t * grad[0];
            const double n2 = g2 + t * grad[1];
            const double nv = h(n1, n2);
            if (std::isfinite(nv) && nv > val + 0.3 * t * gn * gn) {
                g1 = n1;
                g2 = n2;
                val = nv;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            out.converged = gn < 1e-6 * (1.0 + std::abs(val));
            break;
        }
    }

    // Newton polish on the stationarity system (finite-difference Hessian of
    // the concave objective).
    for (int it = 0; it < 8; ++it) {
        if (!gradient(h, g1, g2, val, grad)) break;
        const double gn = std::hypot(grad[0], grad[1]);
        if (gn < 1e-13 * (1.0 + std::abs(val))) break;
        const double step = 1e-5 * (1.0 + std::hypot(g1, g2));
        const double hc = h(g1, g2);
        const double hpp = h(g1 + step, g2), hmm = h(g1 - step, g2);
        const double hqq = h(g1, g2 + step), hnn = h(g1, g2 - step);
        const double hpq = h(g1 + step, g2 + step), hmq = h(g1 - step, g2 - step);
        if (!std::isfinite(hpp) || !std::isfinite(hmm) || !std::isfinite(hqq) ||
            !std::isfinite(hnn) || !std::isfinite(hpq) || !std::isfinite(hmq)) {
            break;
        }
        const double a = (hpp - 2.0 * hc + hmm) / (step * step);
        const double c = (hqq - 2.0 * hc + hnn) / (step * step);
        const double b = (hpq + hmq + 2.0 * hc - hpp - hmm - hqq - hnn) / (2.0 * step * step);
        const double det = a * c - b * b;
        if (!(det > 0.0) || !(a < 0.0)) break;  // need a definite (concave) Hessian
        const double s1 = -(c * grad[0] - b * grad[1]) / det;
        const double s2 = -(a * grad[1] - b * grad[0]) / det;
        const double nv = h(g1 + s1, g2 + s2);
        if (!std::isfinite(nv) || nv < val - 1e-12) break;
        g1 += s1;
        g2 += s2;
        val = nv;
    }

    out.value = val;
    out.g1 = g1;
    out.g2 = g2;
    return out;
}

}  // namespace

LegendrePoint legendre_point(const Cgf& cgf, double q, double w, const LegendreConfig& config) {
    const double box = config.gamma_box > 0.0 ? config.gamma_box : 50.0 / cgf.min_quantum();
    const double start_box = config.start_box > 0.0 ? config.start_box : 2.0 / cgf.min_quantum();
    const Objective h{cgf, q, w, box};

    LegendrePoint best{-kInf, 0.0, 0.0, false};
    const int n = config.starts_per_axis;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double s1 = (n == 1) ? 0.0 : -start_box + 2.0 * start_box * i / (n - 1);
            const double s2 = (n == 1) ? 0.0 : -start_box + 2.0 * start_box * j / (n - 1);
            if (!std::isfinite(h(s1, s2))) continue;
            const LegendrePoint cand = ascend(h, s1, s2, config);
            // Ties: largest objective, then smallest |gamma|.
            const bool better =
                cand.value > best.value + 1e-15 ||
                (std::abs(cand.value - best.value) <= 1e-15 &&
                 std::hypot(cand.g1, cand.g2) < std::hypot(best.g1, best.g2));
            if (better) best = cand;
        }
    }
    if (!std::isfinite(best.value)) {
        // No admissible start; the origin is always in-domain for normalized CGFs.
        best = ascend(h, 0.0, 0.0, config);
    }
    return best;
}

LegendreGrid legendre_2d(const Cgf& cgf, const std::vector<double>& q_grid,
                         const std::vector<double>& w_grid, const LegendreConfig& config) {
    LegendreGrid grid;
    grid.q_axis = q_grid;
    grid.w_axis = w_grid;
    grid.values.resize(q_grid.size() * w_grid.size());
    grid.flags.resize(grid.values.size());
    for (std::size_t iq = 0; iq < q_grid.size(); ++iq) {
        for (std::size_t iw = 0; iw < w_grid.size(); ++iw) {
            const LegendrePoint p = legendre_point(cgf, q_grid[iq], w_grid[iw], config);
            grid.values[iq * w_grid.size() + iw] = std::max(0.0, p.value);
            grid.flags[iq * w_grid.size() + iw] = p.converged ? 1 : 0;
        }
    }
    return grid;
}

double rate_function_contraction(const Cgf& cgf, double eta, const LegendreConfig& config) {
    // Scale the q bracket from the mean heat, read off the CGF gradient.
    const double d = 1e-5 / cgf.min_quantum();
    const double mean_q = (cgf(d, 0.0).value - cgf(-d, 0.0).value) / (2.0 * d);
    const double scale = std::max(std::abs(mean_q), 1e-3);

    auto objective = [&](double q) { return legendre_point(cgf, q, -eta * q, config).value; };

    double best_q = 0.0;
    double best_v = kInf;
    const int n_scan = 61;
    const double lo = -4.0 * scale, hi = 6.0 * scale;
    for (int i = 0; i < n_scan; ++i) {
        const double q = lo + (hi - lo) * i / (n_scan - 1);
        const double v = objective(q);
        if (v < best_v) {
            best_v = v;
            best_q = q;
        }
    }
    double a = best_q - (hi - lo) / (n_scan - 1);
    double b = best_q + (hi - lo) / (n_scan - 1);
    constexpr double R = 0.6180339887498949;
    constexpr double C = 1.0 - R;
    double x1 = a + C * (b - a);
    double x2 = a + R * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > 1e-7 * scale) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + C * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = objective(x2);
        }
    }
    return std::max(0.0, std::min({best_v, f1, f2}));
}

ContourGrid contour_grid(const Cgf& cgf, const ContourBounds& bounds,
                         std::size_t n1, std::size_t n2, int threads) {
    if (n1 < 2 || n2 < 2 || !(bounds.g1_max > bounds.g1_min) || !(bounds.g2_max > bounds.g2_min)) {
        throw std::invalid_argument("contour_grid: need a nonempty window and >= 2 points per axis");
    }
    ContourGrid grid;
    grid.gamma1_axis.resize(n1);
    grid.gamma2_axis.resize(n2);
    for (std::size_t i = 0; i < n1; ++i) {
        grid.gamma1_axis[i] = bounds.g1_min + (bounds.g1_max - bounds.g1_min) * i / (n1 - 1);
    }
    for (std::size_t j = 0; j < n2; ++j) {
        grid.gamma2_axis[j] = bounds.g2_min + (bounds.g2_max - bounds.g2_min) * j / (n2 - 1);
    }
    grid.values.resize(n1 * n2);
    parallel_for(n1, threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < n2; ++j) {
            grid.values[i * n2 + j] = cgf(grid.gamma1_axis[i], grid.gamma2_axis[j]);
        }
    });
    return grid;
}

bool degeneracy_check(const Cgf& cgf, double eta_th, double tolerance) {
    int valid = 0;
    double max_diff = 0.0;
    for (int k = 0; k < 8; ++k) {
        const double r = 1.6 * std::pow(2.0, -k) / std::max(1.0, cgf.min_quantum() / 2.0);
        for (const double frac : {-1.0, 0.37, 1.0}) {
            const double g2 = frac * r;
            for (const double off : {-0.35 * r, 0.15 * r}) {
                const double g1 = eta_th * g2 + off;
                for (const double delta : {0.6 * r, -0.45 * r}) {
                    const CgfValue v1 = cgf(g1, g2);
                    const CgfValue v2 = cgf(g1 + eta_th * delta, g2 + delta);
                    if (!v1.is_finite() || !v2.is_finite()) continue;
                    ++valid;
                    max_diff = std::max(max_diff, std::abs(v2.value - v1.value));
                }
            }
        }
    }
    if (valid < 8) {
        throw std::runtime_error("degeneracy_check: too few in-domain sample pairs");
    }
    return max_diff < tolerance;
}

}  // namespace qotto
