// Transition-matrix extraction checked against two independent oracles: a
// coefficient recurrence from the algebraic ODE of the generating function,
// and high-order finite differences of the closed form along the n = 0 row.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "qotto/joint.hpp"
#include "qotto/series.hpp"

using namespace qotto;

namespace {

// Independent route: sqrt(2/R) satisfies R*dP/du = -(1/2)*(dR/du)*P, which
// pins every Taylor coefficient through a sparse linear recurrence.
std::vector<std::vector<long double>> recurrence_coefficients(double q_star, std::size_t n) {
    const long double q = q_star;
    std::vector<std::vector<long double>> p(n, std::vector<long double>(n, 0.0L));
    p[0][0] = std::sqrt(2.0L / (q + 1.0L));
    for (std::size_t b = 0; b < n; ++b) {
        if (b > 0) p[0][b] = p[b][0];  // symmetry seeds the column
        for (std::size_t a = 0; a + 1 < n; ++a) {
            long double rhs = 0.0L;
            if (a >= 1) rhs -= (1.0L - q) * static_cast<long double>(a) * p[a - 1][b];
            if (b >= 2) rhs -= (1.0L - q) * static_cast<long double>(a + 1) * p[a + 1][b - 2];
            if (b >= 1) rhs += (4.0L * a + 2.0L) * p[a][b - 1];
            if (a >= 1 && b >= 2) rhs -= (q + 1.0L) * static_cast<long double>(a) * p[a - 1][b - 2];
            p[a + 1][b] = rhs / ((q + 1.0L) * static_cast<long double>(a + 1));
        }
    }
    return p;
}

// m-th Taylor coefficient of f at 0 from central finite differences with
// Fornberg stencil weights (B. Fornberg, Math. Comp. 51, 1988).
template <typename F>
long double fd_taylor_coefficient(F f, int m, long double h) {
    const int r = m / 2 + 5;
    const int np = 2 * r + 1;
    std::vector<long double> x(np);
    for (int i = 0; i < np; ++i) x[i] = (i - r) * h;
    std::vector<std::vector<long double>> c(np, std::vector<long double>(m + 1, 0.0L));
    c[0][0] = 1.0L;
    long double c1 = 1.0L;
    long double c4 = x[0];
    for (int i = 1; i < np; ++i) {
        const int mn = std::min(i, m);
        long double c2 = 1.0L;
        const long double c5 = c4;
        c4 = x[i];
        for (int j = 0; j < i; ++j) {
            const long double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    long double deriv = 0.0L;
    for (int i = 0; i < np; ++i) deriv += c[i][m] * f(x[i]);
    long double fact = 1.0L;
    for (int k = 2; k <= m; ++k) fact *= k;
    return deriv / fact;
}

}  // namespace

TEST_CASE("q_star = 1 gives the identity matrix exactly") {
    const TransitionMatrix t = harmonic_transitions(1.0, 32);
    for (std::size_t n = 0; n < t.dim(); ++n) {
        for (std::size_t m = 0; m < t.dim(); ++m) {
            CHECK(t(n, m) == (n == m ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("series route reproduces the identity at q_star = 1 without the fast path") {
    // Exercise rsqrt directly on the collapsed radicand 2(1-uv)^2.
    series::BivariateSeries r(16);
    r.at(0, 0) = 2.0L;
    r.at(1, 1) = -4.0L;
    r.at(2, 2) = 2.0L;
    const auto inv = series::rsqrt(r, 16, true);
    for (std::size_t i = 0; i <= 16; ++i) {
        for (std::size_t j = 0; j <= 16; ++j) {
            const double expected = (i == j) ? 1.0 / std::sqrt(2.0) : 0.0;
            CHECK(static_cast<double>(inv.at(i, j)) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("ground-state coefficient and structural properties") {
    for (const double q : {1.0, 1.1, 1.2, 2.0}) {
        const std::size_t n = 64;
        const TransitionMatrix t = harmonic_transitions(q, n);

        CHECK(t(0, 0) == doctest::Approx(std::sqrt(2.0 / (q + 1.0))).epsilon(1e-13));

        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if ((a + b) % 2 == 1) CHECK(t(a, b) == 0.0);  // parity zeros are exact
                CHECK(t(a, b) >= 0.0);
                CHECK(t(a, b) == doctest::Approx(t(b, a)).epsilon(1e-13));
            }
        }
        // rows with near-complete tails; the spread widens with both n and
        // q_star, so deep rows need the padded builds checked below
        for (std::size_t a = 0; a < 8; ++a) {
            CHECK(t.row_sum(a) == doctest::Approx(1.0).epsilon(2e-7));
            CHECK(t.col_sum(a) == doctest::Approx(1.0).epsilon(2e-7));
        }
    }

    // padded build: the leading 64x64 block is tail-complete at dimension 192
    {
        const TransitionMatrix t = harmonic_transitions(1.2, 192);
        for (std::size_t a = 0; a < 64; ++a) {
            CHECK(t.row_sum(a) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(t.col_sum(a) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("Newton series matches the ODE-recurrence oracle") {
    for (const double q : {1.1, 1.2, 2.0, 5.0}) {
        const std::size_t n = 40;
        const TransitionMatrix t = harmonic_transitions(q, n);
        const auto oracle = recurrence_coefficients(q, n);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                const double expected = static_cast<double>(oracle[a][b]);
                CHECK(t(a, b) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("n = 0 row matches finite-difference differentiation of the closed form") {
    const double q = 1.2;
    const TransitionMatrix t = harmonic_transitions(q, 12);
    auto f = [q](long double v) {
        const long double r = (q + 1.0L) + (1.0L - q) * v * v;
        return std::sqrt(2.0L / r);
    };
    for (int m = 0; m <= 8; m += 2) {
        const long double c1 = fd_taylor_coefficient(f, m, 0.12L);
        const long double c2 = fd_taylor_coefficient(f, m, 0.08L);
        CHECK(t(0, static_cast<std::size_t>(m)) == doctest::Approx(static_cast<double>(c2)).epsilon(1e-9));
        CHECK(std::abs(static_cast<double>(c1 - c2)) < 1e-9);  // step-halving consistency
    }
}

TEST_CASE("row means scale with the adiabaticity parameter") {
    // Mean outgoing level obeys <m> + 1/2 = q*(n + 1/2), a closed-form
    // property of the generating function.
    const double q = 1.3;
    const TransitionMatrix t = harmonic_transitions(q, 96);
    for (std::size_t n = 0; n < 12; ++n) {
        double mean = 0.0, mass = 0.0;
        for (std::size_t m = 0; m < t.dim(); ++m) {
            mean += static_cast<double>(m) * t(n, m);
            mass += t(n, m);
        }
        mean /= mass;
        CHECK(mean == doctest::Approx(q * (n + 0.5) - 0.5).epsilon(1e-8));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(harmonic_transitions(0.99, 16), std::invalid_argument);
    CHECK_THROWS_AS(harmonic_transitions(1.2, 1), std::invalid_argument);
}
