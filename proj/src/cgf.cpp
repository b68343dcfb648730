#include "qotto/cgf.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "qotto/numeric.hpp"

namespace qotto {

using numeric::log_2cosh;
using numeric::log_one_minus_exp;
using numeric::log_sum_exp;
using numeric::neg_inf;
using numeric::SignedLog;

const char* to_string(CgfValue::Reason reason) {
    switch (reason) {
        case CgfValue::Reason::none: return "finite";
        case CgfValue::Reason::radicand_nonpositive: return "radicand-nonpositive";
        case CgfValue::Reason::series_divergent: return "series-divergent";
        case CgfValue::Reason::spectral_sum_divergent: return "spectral-sum-divergent";
    }
    return "unknown";
}

namespace {

// One term of the ten-term two-level sum: weight * exp(g1*q2 + g2*w).
struct LogTerm {
    double q2;
    double w;
    double log_weight;
};

// The Eq. 7 structure with the three stroke-pair weights (diagonal-diagonal,
// mixed, offdiagonal-offdiagonal) passed in. The exact CGF uses
// (u^2, 2uv, v^2); the linear-response expansion replaces them by
// (2u-1, 2v, 0), which is the first-order Taylor around u = 1.
std::vector<LogTerm> two_level_terms(const TwoLevelEngine& engine, const BathPair& baths,
                                     double w_dd, double w_mix, double w_oo) {
    const double x = baths.beta_c * engine.nu0;
    const double y = baths.beta_h * engine.nu_tau;
    const double a = 2.0 * engine.nu0;
    const double b = 2.0 * engine.nu_tau;

    std::vector<LogTerm> terms;
    terms.reserve(10);
    auto add = [&terms](double coeff, double log_rest, double q2, double w) {
        if (coeff <= 0.0) return;
        terms.push_back({q2, w, std::log(coeff) + log_rest});
    };
    const double ln2 = std::log(2.0);
    add(w_dd, log_2cosh(x + y), 0.0, 0.0);
    add(w_oo, log_2cosh(x - y), 0.0, 0.0);
    add(w_mix, -x + log_2cosh(y) - ln2, 0.0, -a);  // w_mix * e^{-x} * cosh(y)
    add(w_mix, x + log_2cosh(y) - ln2, 0.0, a);
    add(w_dd, x - y, b, a - b);
    add(w_oo, -x - y, b, -(a + b));
    add(w_mix, -y + log_2cosh(x) - ln2, b, -b);
    add(w_dd, -x + y, -b, b - a);
    add(w_oo, x + y, -b, a + b);
    add(w_mix, y + log_2cosh(x) - ln2, -b, b);
    return terms;
}

double eval_terms(const std::vector<LogTerm>& terms, double g1, double g2) {
    double m = neg_inf;
    for (const LogTerm& t : terms) m = std::max(m, t.log_weight + g1 * t.q2 + g2 * t.w);
    double s = 0.0;
    for (const LogTerm& t : terms) s += std::exp(t.log_weight + g1 * t.q2 + g2 * t.w - m);
    return m + std::log(s);
}

// Signed log of the S13 radicand Q(1-a^2)(1-b^2)+(1+a^2)(1+b^2)-4ab with
// a = exp(la), b = exp(lb).
SignedLog log_radicand(double la, double lb, double q) {
    const std::array<SignedLog, 5> parts = {{
        {1, std::log(q + 1.0)},
        {q > 1.0 ? -1 : (q < 1.0 ? 1 : 0), std::log(std::abs(1.0 - q)) + 2.0 * la},
        {q > 1.0 ? -1 : (q < 1.0 ? 1 : 0), std::log(std::abs(1.0 - q)) + 2.0 * lb},
        {1, std::log(q + 1.0) + 2.0 * (la + lb)},
        {-1, std::log(4.0) + la + lb},
    }};
    SignedLog acc{0, neg_inf};
    for (const SignedLog& p : parts) acc = numeric::signed_add(acc, p);
    return acc;
}

struct HarmonicLogVars {
    double lu0, lv0, lx0, ly0;
};

HarmonicLogVars harmonic_log_vars(double g1, double g2, const HarmonicEngine& e, const BathPair& b) {
    return {
        -e.omega0 * (b.beta_c + g2),
        e.omega_tau * (g2 - g1),
        -b.beta_h * e.omega_tau + e.omega_tau * (g1 - g2),
        e.omega0 * g2,
    };
}

// ln of the exact harmonic MGF up to the g-independent prefactor.
CgfValue harmonic_log_mgf(double g1, double g2, const HarmonicEngine& engine, const BathPair& baths) {
    const HarmonicLogVars v = harmonic_log_vars(g1, g2, engine, baths);
    if (v.lu0 + v.lv0 >= 0.0 || v.lx0 + v.ly0 >= 0.0) {
        return CgfValue::undefined(CgfValue::Reason::series_divergent);
    }
    const SignedLog r_exp = log_radicand(v.lu0, v.lv0, engine.q_star);
    const SignedLog r_com = log_radicand(v.lx0, v.ly0, engine.q_star);
    if (r_exp.sign <= 0 || r_com.sign <= 0) {
        return CgfValue::undefined(CgfValue::Reason::radicand_nonpositive);
    }
    return CgfValue::finite(-0.5 * (r_exp.log_abs + r_com.log_abs));
}

// ln of the linear-response harmonic MGF up to the prefactor:
// A * (1 + (1-q)/4 * (B_exp + B_com)) with A the adiabatic product and
// B = (1-a^2)(1-b^2)/(1-ab)^2.
CgfValue harmonic_linear_log_mgf(double g1, double g2, const HarmonicEngine& engine,
                                 const BathPair& baths) {
    const HarmonicLogVars v = harmonic_log_vars(g1, g2, engine, baths);
    if (v.lu0 + v.lv0 >= 0.0 || v.lx0 + v.ly0 >= 0.0) {
        return CgfValue::undefined(CgfValue::Reason::series_divergent);
    }
    const double log_one_minus_uv = std::log1p(-std::exp(v.lu0 + v.lv0));
    const double log_one_minus_xy = std::log1p(-std::exp(v.lx0 + v.ly0));
    const double log_a = -log_one_minus_uv - log_one_minus_xy;

    auto b_factor = [](double la, double lb, double log_one_minus_ab) {
        SignedLog num = numeric::signed_mul(log_one_minus_exp(2.0 * la), log_one_minus_exp(2.0 * lb));
        num.log_abs -= 2.0 * log_one_minus_ab;
        return num;
    };
    SignedLog bsum = numeric::signed_add(b_factor(v.lu0, v.lv0, log_one_minus_uv),
                                         b_factor(v.lx0, v.ly0, log_one_minus_xy));
    const double q = engine.q_star;
    SignedLog t{0, neg_inf};
    if (q != 1.0 && bsum.sign != 0) {
        t = {bsum.sign * (q > 1.0 ? -1 : 1), bsum.log_abs + std::log(std::abs(1.0 - q) / 4.0)};
    }
    // 1 + t
    SignedLog one_plus_t = numeric::signed_add({1, 0.0}, t);
    if (one_plus_t.sign <= 0) {
        return CgfValue::undefined(CgfValue::Reason::radicand_nonpositive);
    }
    return CgfValue::finite(log_a + one_plus_t.log_abs);
}

double scale_invariant_coupling(double g1, double g2, double eps_sq) {
    return g1 / eps_sq + (1.0 - 1.0 / eps_sq) * g2;
}

}  // namespace

CgfValue cgf_two_level(double g1, double g2, const TwoLevelEngine& engine, const BathPair& baths) {
    const double u = engine.u;
    const double v = 1.0 - u;
    const auto terms = two_level_terms(engine, baths, u * u, 2.0 * u * v, v * v);
    return CgfValue::finite(eval_terms(terms, g1, g2) - eval_terms(terms, 0.0, 0.0));
}

CgfValue cgf_two_level_linear(double g1, double g2, const TwoLevelEngine& engine,
                              const BathPair& baths) {
    const double u = engine.u;
    if (u < 0.5) {
        // The first-order weights 2u-1 turn negative; the expansion stops
        // being a positive measure and its log is not usable.
        return CgfValue::undefined(CgfValue::Reason::series_divergent);
    }
    const auto terms = two_level_terms(engine, baths, 2.0 * u - 1.0, 2.0 * (1.0 - u), 0.0);
    return CgfValue::finite(eval_terms(terms, g1, g2) - eval_terms(terms, 0.0, 0.0));
}

CgfValue cgf_harmonic(double g1, double g2, const HarmonicEngine& engine, const BathPair& baths) {
    const CgfValue val = harmonic_log_mgf(g1, g2, engine, baths);
    if (!val.is_finite()) return val;
    const CgfValue origin = harmonic_log_mgf(0.0, 0.0, engine, baths);
    return CgfValue::finite(val.value - origin.value);
}

CgfValue cgf_harmonic_linear(double g1, double g2, const HarmonicEngine& engine,
                             const BathPair& baths) {
    const CgfValue val = harmonic_linear_log_mgf(g1, g2, engine, baths);
    if (!val.is_finite()) return val;
    const CgfValue origin = harmonic_linear_log_mgf(0.0, 0.0, engine, baths);
    return CgfValue::finite(val.value - origin.value);
}

CgfValue cgf_scale_invariant(double g1, double g2, const ScaleInvariantEngine& engine,
                             const BathPair& baths) {
    const double eps_sq = engine.eps_tau_sq;
    auto log_sums = [&engine, eps_sq](double a, double beta_c, double beta_h) {
        const double beta_eff_cold = beta_c + a;
        const double beta_eff_hot = beta_h / eps_sq - a;
        std::vector<double> cold, hot;
        cold.reserve(engine.spectrum.size());
        hot.reserve(engine.spectrum.size());
        for (double e : engine.spectrum) {
            cold.push_back(-beta_eff_cold * e);
            hot.push_back(-beta_eff_hot * e);
        }
        return log_sum_exp(cold) + log_sum_exp(hot);
    };
    const double a = scale_invariant_coupling(g1, g2, eps_sq);
    if (!(baths.beta_c + a > 0.0) || !(baths.beta_h / eps_sq - a > 0.0)) {
        return CgfValue::undefined(CgfValue::Reason::spectral_sum_divergent);
    }
    return CgfValue::finite(log_sums(a, baths.beta_c, baths.beta_h) -
                            log_sums(0.0, baths.beta_c, baths.beta_h));
}

CgfValue cgf_from_distribution(double g1, double g2, const JointDistribution& dist) {
    if (dist.atoms.empty()) {
        throw std::invalid_argument("cgf_from_distribution: empty distribution");
    }
    double m = neg_inf;
    for (const Atom& a : dist.atoms) {
        if (a.p <= 0.0) continue;
        m = std::max(m, std::log(a.p) + g1 * a.q2 + g2 * a.w);
    }
    double s = 0.0;
    for (const Atom& a : dist.atoms) {
        if (a.p <= 0.0) continue;
        s += std::exp(std::log(a.p) + g1 * a.q2 + g2 * a.w - m);
    }
    return CgfValue::finite(m + std::log(s));
}

// The factories bake the term tables and origin values into the closure;
// grid evaluations then skip the per-call setup of the free functions.

Cgf make_cgf(const TwoLevelEngine& engine, const BathPair& baths) {
    const double u = engine.u;
    const double v = 1.0 - u;
    auto terms = two_level_terms(engine, baths, u * u, 2.0 * u * v, v * v);
    const double origin = eval_terms(terms, 0.0, 0.0);
    return Cgf(
        [terms = std::move(terms), origin](double g1, double g2) {
            return CgfValue::finite(eval_terms(terms, g1, g2) - origin);
        },
        2.0 * engine.nu0, "two_level");
}

Cgf make_cgf_linear(const TwoLevelEngine& engine, const BathPair& baths) {
    if (engine.u < 0.5) {
        return Cgf([](double, double) { return CgfValue::undefined(CgfValue::Reason::series_divergent); },
                   2.0 * engine.nu0, "two_level_linear");
    }
    auto terms = two_level_terms(engine, baths, 2.0 * engine.u - 1.0, 2.0 * (1.0 - engine.u), 0.0);
    const double origin = eval_terms(terms, 0.0, 0.0);
    return Cgf(
        [terms = std::move(terms), origin](double g1, double g2) {
            return CgfValue::finite(eval_terms(terms, g1, g2) - origin);
        },
        2.0 * engine.nu0, "two_level_linear");
}

Cgf make_cgf(const HarmonicEngine& engine, const BathPair& baths) {
    const double origin = harmonic_log_mgf(0.0, 0.0, engine, baths).value;
    return Cgf(
        [engine, baths, origin](double g1, double g2) {
            const CgfValue val = harmonic_log_mgf(g1, g2, engine, baths);
            if (!val.is_finite()) return val;
            return CgfValue::finite(val.value - origin);
        },
        engine.omega0, "harmonic");
}

Cgf make_cgf_linear(const HarmonicEngine& engine, const BathPair& baths) {
    const double origin = harmonic_linear_log_mgf(0.0, 0.0, engine, baths).value;
    return Cgf(
        [engine, baths, origin](double g1, double g2) {
            const CgfValue val = harmonic_linear_log_mgf(g1, g2, engine, baths);
            if (!val.is_finite()) return val;
            return CgfValue::finite(val.value - origin);
        },
        engine.omega0, "harmonic_linear");
}

Cgf make_cgf(const ScaleInvariantEngine& engine, const BathPair& baths) {
    double gap = engine.spectrum.back() - engine.spectrum.front();
    for (std::size_t i = 1; i < engine.spectrum.size(); ++i) {
        gap = std::min(gap, engine.spectrum[i] - engine.spectrum[i - 1]);
    }
    return Cgf([engine, baths](double g1, double g2) { return cgf_scale_invariant(g1, g2, engine, baths); },
               gap, "scale_invariant");
}

Cgf make_cgf(JointDistribution dist, double min_quantum, std::string label) {
    auto shared = std::make_shared<JointDistribution>(std::move(dist));
    const double origin = cgf_from_distribution(0.0, 0.0, *shared).value;
    return Cgf(
        [shared, origin](double g1, double g2) {
            return CgfValue::finite(cgf_from_distribution(g1, g2, *shared).value - origin);
        },
        min_quantum, std::move(label));
}

}  // namespace qotto
