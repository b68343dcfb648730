#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "doctest.h"
#include "qotto/cgf.hpp"
#include "qotto/joint.hpp"
#include "qotto/ldf.hpp"

using namespace qotto;

namespace {

const BathPair fig_baths{3.0, 0.1};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

// Independent per-cell oracle for the Legendre conjugate of the two-level
// CGF: solve grad phi = (q, w) by Newton with analytic tilted moments.
double saddle_oracle(const JointDistribution& dist, double q, double w) {
    double g1 = 0.0, g2 = 0.0;
    for (int it = 0; it < 200; ++it) {
        double z = 0.0, mq = 0.0, mw = 0.0;
        for (const Atom& a : dist.atoms) {
            const double e = a.p * std::exp(g1 * a.q2 + g2 * a.w);
            z += e;
            mq += e * a.q2;
            mw += e * a.w;
        }
        mq /= z;
        mw /= z;
        double vq = 0.0, vw = 0.0, cqw = 0.0;
        for (const Atom& a : dist.atoms) {
            const double e = a.p * std::exp(g1 * a.q2 + g2 * a.w);
            vq += e * (a.q2 - mq) * (a.q2 - mq);
            vw += e * (a.w - mw) * (a.w - mw);
            cqw += e * (a.q2 - mq) * (a.w - mw);
        }
        vq /= z;
        vw /= z;
        cqw /= z;
        const double r1 = mq - q, r2 = mw - w;
        if (std::abs(r1) + std::abs(r2) < 1e-13) break;
        const double det = vq * vw - cqw * cqw;
        g1 -= (vw * r1 - cqw * r2) / det;
        g2 -= (vq * r2 - cqw * r1) / det;
    }
    double z = 0.0;
    for (const Atom& a : dist.atoms) z += a.p * std::exp(g1 * a.q2 + g2 * a.w);
    return g1 * q + g2 * w - std::log(z);
}

}  // namespace

TEST_CASE("rate function vanishes at the macroscopic efficiency") {
    const TwoLevelEngine tl(1.0, 2.0, 0.95);
    const HarmonicEngine ho(1.0, 2.0, 1.2);

    {
        const Cgf cgf = make_cgf(tl, fig_baths);
        const MomentSummary m = moments(build_joint_two_level(tl, fig_baths));
        const RateFunctionPoint p = rate_function(cgf, *m.eta_macroscopic);
        CHECK(p.status == RateStatus::converged);
        CHECK(p.j >= 0.0);
        CHECK(p.j < 1e-8);
    }
    {
        const Cgf cgf = make_cgf(ho, fig_baths);
        const MomentSummary m = moments(build_joint_harmonic(ho, fig_baths, 256));
        const RateFunctionPoint p = rate_function(cgf, *m.eta_macroscopic);
        CHECK(p.status == RateStatus::converged);
        CHECK(p.j < 1e-8);
    }
}

TEST_CASE("degeneracy check distinguishes adiabatic from nonadiabatic CGFs") {
    CHECK(degeneracy_check(make_cgf(TwoLevelEngine(1.0, 2.0, 1.0), fig_baths), 0.5));
    CHECK(degeneracy_check(make_cgf(HarmonicEngine(1.0, 2.0, 1.0), fig_baths), 0.5));
    CHECK_FALSE(degeneracy_check(make_cgf(TwoLevelEngine(1.0, 2.0, 0.95), fig_baths), 0.5));
    CHECK_FALSE(degeneracy_check(make_cgf(HarmonicEngine(1.0, 2.0, 1.2), fig_baths), 0.5));
}

TEST_CASE("adiabatic rate curve is the deterministic plateau") {
    const TwoLevelEngine tl(1.0, 2.0, 1.0);
    const Cgf cgf = make_cgf(tl, fig_baths);
    const auto grid = linspace(-0.5, 1.5, 201);
    const RateFunctionCurve curve = rate_curve(cgf, grid, {}, 0.5, fig_baths.eta_carnot());

    CHECK(curve.degenerate);
    for (const RateFunctionPoint& p : curve.points) {
        if (std::abs(p.eta - 0.5) > 1e-3) {
            CHECK(std::isinf(p.j));
            CHECK(p.status == RateStatus::diverged_to_minus_infinity);
        } else {
            CHECK(p.j < 1e-8);
            CHECK(p.status == RateStatus::converged);
        }
    }
}

TEST_CASE("nonadiabatic rate curve has the expected shape") {
    const TwoLevelEngine tl(1.0, 2.0, 0.95);
    const HarmonicEngine ho(1.0, 2.0, 1.2);
    const Cgf cgf_tl = make_cgf(tl, fig_baths);
    const Cgf cgf_ho = make_cgf(ho, fig_baths);
    const double eta_th_tl = *moments(build_joint_two_level(tl, fig_baths)).eta_macroscopic;
    const double eta_th_ho = *moments(build_joint_harmonic(ho, fig_baths, 256)).eta_macroscopic;

    const auto grid = linspace(-0.5, 1.5, 81);
    const RateFunctionCurve ctl = rate_curve(cgf_tl, grid, {}, eta_th_tl, fig_baths.eta_carnot());
    const RateFunctionCurve cho = rate_curve(cgf_ho, grid, {}, eta_th_ho, fig_baths.eta_carnot());
    CHECK_FALSE(ctl.degenerate);
    CHECK_FALSE(cho.degenerate);

    // finite, nonnegative, and rooted at the grid point nearest eta_th
    std::size_t best_tl = 0, best_ho = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(ctl.points[i].status == RateStatus::converged);
        CHECK(cho.points[i].status == RateStatus::converged);
        CHECK(ctl.points[i].j >= 0.0);
        CHECK(cho.points[i].j >= 0.0);
        if (ctl.points[i].j < ctl.points[best_tl].j) best_tl = i;
        if (cho.points[i].j < cho.points[best_ho].j) best_ho = i;
    }
    CHECK(std::abs(grid[best_tl] - eta_th_tl) <= 0.5 * (grid[1] - grid[0]) + 1e-12);
    CHECK(std::abs(grid[best_ho] - eta_th_ho) <= 0.5 * (grid[1] - grid[0]) + 1e-12);

    // the harmonic curve dominates the two-level one away from the roots
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid[i] - eta_th_tl) < 0.1 || std::abs(grid[i] - eta_th_ho) < 0.1) continue;
        CHECK(cho.points[i].j >= ctl.points[i].j - 1e-8);
    }

    // local maximum at the Carnot efficiency
    const double eta_ca = fig_baths.eta_carnot();
    for (const Cgf* cgf : {&cgf_tl, &cgf_ho}) {
        const double jm = rate_function(*cgf, eta_ca - 5e-3).j;
        const double jc = rate_function(*cgf, eta_ca).j;
        const double jp = rate_function(*cgf, eta_ca + 5e-3).j;
        CHECK(jc > jm);
        CHECK(jc > jp);
    }
}

TEST_CASE("rate curves are deterministic") {
    const Cgf cgf = make_cgf(TwoLevelEngine(1.0, 2.0, 0.95), fig_baths);
    const auto grid = linspace(-0.25, 1.25, 31);
    const RateFunctionCurve a = rate_curve(cgf, grid, {}, 0.4146, fig_baths.eta_carnot());
    const RateFunctionCurve b = rate_curve(cgf, grid, {}, 0.4146, fig_baths.eta_carnot());
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(std::memcmp(&a.points[i].j, &b.points[i].j, sizeof(double)) == 0);
        CHECK(a.points[i].status == b.points[i].status);
    }
}

TEST_CASE("Legendre conjugate") {
    const TwoLevelEngine tl(1.0, 2.0, 0.95);
    const Cgf cgf = make_cgf(tl, fig_baths);
    const JointDistribution dist = build_joint_two_level(tl, fig_baths);
    const MomentSummary m = moments(dist);

    SUBCASE("vanishes at the mean") {
        const LegendrePoint p = legendre_point(cgf, m.mean_q2, m.mean_w);
        CHECK(p.converged);
        CHECK(std::abs(p.value) < 1e-9);
    }

    SUBCASE("matches the independent saddle-point oracle at interior cells") {
        const struct {
            double q, w;
        } cells[] = {{2.0, -1.2}, {1.0, -0.3}, {3.0, -1.4}};
        for (const auto& c : cells) {
            const double oracle = saddle_oracle(dist, c.q, c.w);
            const LegendrePoint p = legendre_point(cgf, c.q, c.w);
            CHECK(p.converged);
            CHECK(p.value == doctest::Approx(oracle).epsilon(1e-8));
        }
    }

    SUBCASE("grid flags cells and stays nonnegative") {
        const LegendreGrid grid = legendre_2d(cgf, {m.mean_q2, 2.0}, {m.mean_w, -1.0});
        for (double v : grid.values) CHECK(v >= 0.0);
        CHECK(grid.at(0, 0) < 1e-9);
    }

    SUBCASE("contraction route agrees with the line minimization") {
        for (const double eta : {0.2, 0.4146, 0.8}) {
            const double direct = rate_function(cgf, eta).j;
            const double contracted = rate_function_contraction(cgf, eta);
            CHECK(contracted == doctest::Approx(direct).epsilon(1e-4));
        }
    }
}

TEST_CASE("contour grids") {
    SUBCASE("window validation") {
        const Cgf cgf = make_cgf(TwoLevelEngine(1.0, 2.0, 0.95), fig_baths);
        CHECK_THROWS_AS(contour_grid(cgf, {0.0, 0.0, -1.0, 1.0}, 11, 11), std::invalid_argument);
        CHECK_THROWS_AS(contour_grid(cgf, {-1.0, 1.0, -1.0, 1.0}, 1, 11), std::invalid_argument);
    }

    SUBCASE("two-level grids are everywhere finite") {
        const Cgf cgf = make_cgf(TwoLevelEngine(1.0, 2.0, 0.95), fig_baths);
        const ContourGrid grid = contour_grid(cgf, {-2.0, 2.0, -2.0, 2.0}, 41, 41);
        for (const CgfValue& v : grid.values) CHECK(v.is_finite());
    }

    SUBCASE("nonadiabatic harmonic window contains undefined cells") {
        const Cgf cgf = make_cgf(HarmonicEngine(1.0, 2.0, 1.2), fig_baths);
        const ContourGrid grid = contour_grid(cgf, {-3.0, 3.0, -3.0, 3.0}, 61, 61);
        std::size_t undefined = 0;
        for (const CgfValue& v : grid.values) undefined += v.is_finite() ? 0 : 1;
        CHECK(undefined > 0);
    }

    SUBCASE("adiabatic grids are constant along the efficiency slope") {
        // axes aligned so that the offset (eta_th*d, d) maps nodes to nodes
        const Cgf cgf = make_cgf(TwoLevelEngine(1.0, 2.0, 1.0), fig_baths);
        const ContourGrid grid = contour_grid(cgf, {-1.0, 1.0, -2.0, 2.0}, 21, 21);  // steps 0.1, 0.2
        const std::size_t n2 = grid.gamma2_axis.size();
        for (std::size_t i = 0; i + 1 < grid.gamma1_axis.size(); ++i) {
            for (std::size_t j = 0; j + 1 < n2; ++j) {
                const CgfValue& a = grid.at(i, j);
                const CgfValue& b = grid.at(i + 1, j + 1);  // offset (0.1, 0.2) = (eta_th*d, d)
                if (!a.is_finite() || !b.is_finite()) continue;
                CHECK(std::abs(a.value - b.value) < 1e-10);
            }
        }
    }
}

TEST_CASE("linear-response LDFs broaden the deterministic minimum") {
    // The adiabatic curve is an infinite plateau with a single root; the
    // linear-response curves at nearby parameters stay finite around eta_th
    // and their Carnot maximum flattens into the far-side level.
    const Cgf lin_ho = make_cgf_linear(HarmonicEngine(1.0, 2.0, 1.0005), fig_baths);
    const Cgf lin_tl = make_cgf_linear(TwoLevelEngine(1.0, 2.0, 0.999), fig_baths);
    for (const Cgf* cgf : {&lin_ho, &lin_tl}) {
        for (const double eta : {0.45, 0.5, 0.55}) {
            const RateFunctionPoint p = rate_function(*cgf, eta);
            CHECK(p.status == RateStatus::converged);
            CHECK(std::isfinite(p.j));
        }
        // the root sits at the model's own macroscopic efficiency, a
        // distance O(q* - 1) from 0.5
        const double h = 1e-4;
        auto d = [&](int axis) {
            auto f = [&](double t) { return (*cgf)(axis == 0 ? t : 0.0, axis == 1 ? t : 0.0).value; };
            return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
        };
        const double eta_root = -d(1) / d(0);
        CHECK(std::abs(eta_root - 0.5) < 3e-3);
        CHECK(rate_function(*cgf, eta_root).j < 1e-8);
    }
}
