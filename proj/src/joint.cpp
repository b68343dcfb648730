#include "qotto/joint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "qotto/series.hpp"

namespace qotto {

double JointDistribution::total_mass() const {
    double s = 0.0;
    for (const Atom& a : atoms) s += a.p;
    return s;
}

double TransitionMatrix::row_sum(std::size_t n) const {
    double s = 0.0;
    for (std::size_t m = 0; m < dim_; ++m) s += (*this)(n, m);
    return s;
}

double TransitionMatrix::col_sum(std::size_t m) const {
    double s = 0.0;
    for (std::size_t n = 0; n < dim_; ++n) s += (*this)(n, m);
    return s;
}

TransitionMatrix harmonic_transitions(double q_star, std::size_t n_levels) {
    if (!(q_star >= 1.0)) {
        throw std::invalid_argument("harmonic_transitions: need q_star >= 1");
    }
    if (n_levels < 2) {
        throw std::invalid_argument("harmonic_transitions: need n_levels >= 2");
    }
    TransitionMatrix t(n_levels, q_star);
    if (q_star == 1.0) {
        for (std::size_t n = 0; n < n_levels; ++n) t.entry(n, n) = 1.0;
        return t;
    }

    const std::size_t order = n_levels - 1;
    series::BivariateSeries radicand(std::max<std::size_t>(order, 2));
    radicand.at(0, 0) = static_cast<long double>(q_star) + 1.0L;
    radicand.at(2, 0) = 1.0L - static_cast<long double>(q_star);
    radicand.at(0, 2) = 1.0L - static_cast<long double>(q_star);
    radicand.at(1, 1) = -4.0L;
    radicand.at(2, 2) = static_cast<long double>(q_star) + 1.0L;

    const series::BivariateSeries inv_sqrt = series::rsqrt(radicand, order, /*even_parity=*/true);
    const long double sqrt2 = std::sqrt(2.0L);
    for (std::size_t n = 0; n < n_levels; ++n) {
        for (std::size_t m = 0; m < n_levels; ++m) {
            if ((n + m) & 1u) continue;  // parity selection rule
            long double c = sqrt2 * inv_sqrt.at(n, m);
            if (c < 0.0L) {
                if (c < -1e-12L) {
                    throw std::runtime_error(
                        "harmonic_transitions: negative series coefficient beyond tolerance; "
                        "increase working precision");
                }
                c = 0.0L;
            }
            t.entry(n, m) = static_cast<double>(c);
        }
    }
    return t;
}

namespace {

JointDistribution sorted_distribution(std::vector<Atom> atoms, double tail_mass) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        if (a.q2 != b.q2) return a.q2 < b.q2;
        return a.w < b.w;
    });
    JointDistribution dist;
    dist.atoms = std::move(atoms);
    dist.tail_mass = tail_mass;
    return dist;
}

}  // namespace

JointDistribution build_joint_two_level(const TwoLevelEngine& engine, const BathPair& baths) {
    const auto [cold, hot] = thermal_weights(engine, baths);
    const double u = engine.u;
    const double v = 1.0 - u;
    const double trans[2][2] = {{u, v}, {v, u}};

    // Key on integer multiples of the quanta: Q2 = d*nu_tau, W = i*nu0 - d*nu_tau
    // with d = sign(k)-sign(m), i = sign(l)-sign(n). Equal keys merge exactly.
    std::map<std::pair<int, int>, double> merged;
    for (int n = 0; n < 2; ++n) {
        for (int m = 0; m < 2; ++m) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    const double p = cold[n] * trans[n][m] * hot[k] * trans[k][l];
                    const int d = 2 * (k - m);
                    const int i = 2 * (l - n);
                    merged[{d, i}] += p;
                }
            }
        }
    }
    std::vector<Atom> atoms;
    atoms.reserve(merged.size());
    for (const auto& [key, p] : merged) {
        if (p <= 0.0) continue;
        const double q2 = key.first * engine.nu_tau;
        const double w = key.second * engine.nu0 - q2;
        atoms.push_back({q2, w, p});
    }
    return sorted_distribution(std::move(atoms), 0.0);
}

JointDistribution build_joint_harmonic(const HarmonicEngine& engine, const BathPair& baths,
                                       std::size_t n_levels, double tail_tol, double prune_floor) {
    const TransitionMatrix t = harmonic_transitions(engine.q_star, n_levels);
    const std::size_t n = n_levels;

    // Gibbs weights normalized over the untruncated geometric spectrum, so
    // everything missing from the finite table lands in tail_mass.
    const double rc = std::exp(-baths.beta_c * engine.omega0);
    const double rh = std::exp(-baths.beta_h * engine.omega_tau);

    struct Entry {
        int n, m;
        double p;
    };
    std::vector<Entry> expansion;          // cold Gibbs x transition, sparse
    std::vector<double> compression(n * n, 0.0);  // hot Gibbs x transition, dense rows
    std::vector<std::pair<std::size_t, std::size_t>> row_range(n, {n, 0});
    double mass_exp = 0.0, mass_com = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const double pc = (1.0 - rc) * std::pow(rc, static_cast<double>(a));
        const double ph = (1.0 - rh) * std::pow(rh, static_cast<double>(a));
        for (std::size_t b = 0; b < n; ++b) {
            const double tab = t(a, b);
            if (tab == 0.0) continue;
            if (const double pe = pc * tab; pe > prune_floor) {
                expansion.push_back({static_cast<int>(a), static_cast<int>(b), pe});
                mass_exp += pe;
            }
            if (const double pk = ph * tab; pk > prune_floor) {
                compression[a * n + b] = pk;
                mass_com += pk;
                row_range[a].first = std::min(row_range[a].first, b);
                row_range[a].second = std::max(row_range[a].second, b + 1);
            }
        }
    }

    const double tail = 1.0 - mass_exp * mass_com;
    if (tail > tail_tol) {
        const std::size_t gibbs_req = harmonic_levels_for_tail(engine, baths, tail_tol / 4.0);
        std::size_t width = 0;
        if (engine.q_star > 1.0) {
            const double ratio = (engine.q_star - 1.0) / (engine.q_star + 1.0);
            width = static_cast<std::size_t>(std::ceil(2.0 * std::log(tail_tol / 4.0) / std::log(ratio)));
        }
        throw truncation_error("build_joint_harmonic: tail tolerance unreachable at n_levels",
                               tail, gibbs_req + width);
    }

    // Q2 = omega_tau*(k - m), W = omega0*(l - n) - Q2; integer index
    // differences merge exactly. Accumulate over the product measure of the
    // two stroke pairs on a dense (2n-1)^2 offset grid.
    const std::size_t span = 2 * n - 1;
    std::vector<double> acc(span * span, 0.0);
    for (const Entry& e : expansion) {
        for (std::size_t k = 0; k < n; ++k) {
            auto [lo, hi] = row_range[k];
            if (lo >= hi) continue;
            if (((lo + k) & 1u) != 0) ++lo;  // parity: only k+l even entries are populated
            const double* src = &compression[k * n];
            const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(k) - e.m + static_cast<std::ptrdiff_t>(n) - 1;
            const std::ptrdiff_t col0 = static_cast<std::ptrdiff_t>(n) - 1 - e.n;
            double* dst = &acc[static_cast<std::size_t>(row) * span] + col0;
            const double w = e.p;
            for (std::size_t l = lo; l < hi; l += 2) dst[l] += w * src[l];
        }
    }

    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < span; ++i) {
        for (std::size_t j = 0; j < span; ++j) {
            const double p = acc[i * span + j];
            if (p <= 0.0) continue;
            const double q2 = engine.omega_tau * (static_cast<double>(i) - static_cast<double>(n - 1));
            const double w = engine.omega0 * (static_cast<double>(j) - static_cast<double>(n - 1)) - q2;
            atoms.push_back({q2, w, p});
        }
    }
    return sorted_distribution(std::move(atoms), tail);
}

JointDistribution build_joint_adiabatic_scale_invariant(const ScaleInvariantEngine& engine,
                                                        const BathPair& baths) {
    const auto [cold, hot] = thermal_weights(engine, baths);
    const double eta_th = 1.0 - engine.eps_tau_sq;

    std::map<double, double> merged;  // keyed by the bare level difference
    const std::size_t n_levels = engine.spectrum.size();
    for (std::size_t n = 0; n < n_levels; ++n) {
        for (std::size_t k = 0; k < n_levels; ++k) {
            const double diff = engine.spectrum[k] - engine.spectrum[n];
            merged[diff] += cold[n] * hot[k];
        }
    }
    std::vector<Atom> atoms;
    atoms.reserve(merged.size());
    for (const auto& [diff, p] : merged) {
        if (p <= 0.0) continue;
        const double q2 = diff / engine.eps_tau_sq;
        const double w = -eta_th * q2;  // exact per-atom anticorrelation
        atoms.push_back({q2, w, p});
    }
    return sorted_distribution(std::move(atoms), 0.0);
}

MomentSummary moments(const JointDistribution& dist) {
    if (dist.atoms.empty()) {
        throw std::invalid_argument("moments: empty distribution");
    }
    const double mass = dist.total_mass();
    double mq = 0.0, mw = 0.0;
    for (const Atom& a : dist.atoms) {
        mq += a.p * a.q2;
        mw += a.p * a.w;
    }
    mq /= mass;
    mw /= mass;
    double vq = 0.0, vw = 0.0, cqw = 0.0;
    for (const Atom& a : dist.atoms) {
        const double dq = a.q2 - mq;
        const double dw = a.w - mw;
        vq += a.p * dq * dq;
        vw += a.p * dw * dw;
        cqw += a.p * dq * dw;
    }
    vq /= mass;
    vw /= mass;
    cqw /= mass;

    MomentSummary s;
    s.mean_q2 = mq;
    s.mean_w = mw;
    s.var_q2 = std::max(vq, 0.0);
    s.var_w = std::max(vw, 0.0);
    s.cov_qw = cqw;
    if (s.var_q2 > 0.0 && s.var_w > 0.0) {
        s.pearson = cqw / std::sqrt(s.var_q2 * s.var_w);
    }
    if (mq != 0.0) {
        s.eta_macroscopic = -mw / mq;
    }
    return s;
}

void write_csv(const JointDistribution& dist, std::ostream& os) {
    os << "q2,w,p\n";
    char buf[128];
    for (const Atom& a : dist.atoms) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", a.q2, a.w, a.p);
        os << buf;
    }
}

}  // namespace qotto
