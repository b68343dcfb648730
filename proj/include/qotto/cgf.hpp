// cgf.hpp: bivariate scaled cumulant generating functions
// phi(g1, g2) = ln< exp(g1 Q2 + g2 W) > for each engine model, with explicit
// convergence-domain handling. Every variant is normalized so phi(0,0) = 0.

#pragma once

#include <functional>
#include <string>
#include <utility>

#include "qotto/engines.hpp"
#include "qotto/joint.hpp"

namespace qotto {

// Value of the CGF at one point: finite, or outside the convergence domain.
struct CgfValue {
    enum class Reason {
        none,
        radicand_nonpositive,
        series_divergent,
        spectral_sum_divergent,
    };

    double value{0.0};
    Reason reason{Reason::none};

    bool is_finite() const noexcept { return reason == Reason::none; }

    static CgfValue finite(double v) { return {v, Reason::none}; }
    static CgfValue undefined(Reason r) { return {0.0, r}; }
};

const char* to_string(CgfValue::Reason reason);

// Exact two-level CGF (Eq. 7 structure at real arguments); entire, always finite.
CgfValue cgf_two_level(double g1, double g2, const TwoLevelEngine& engine, const BathPair& baths);

// First order around u = 1: stroke-pair weights (u^2, 2uv, v^2) -> (2u-1, 2v, 0).
CgfValue cgf_two_level_linear(double g1, double g2, const TwoLevelEngine& engine, const BathPair& baths);

// Exact harmonic CGF. Undefined unless both geometric products u0*v0 and
// x0*y0 stay below 1 (series convergence) and both radicands are positive.
CgfValue cgf_harmonic(double g1, double g2, const HarmonicEngine& engine, const BathPair& baths);

// First order around q_star = 1 on the u0*v0 < 1, x0*y0 < 1 domain.
CgfValue cgf_harmonic_linear(double g1, double g2, const HarmonicEngine& engine, const BathPair& baths);

// Adiabatic scale-invariant CGF over the truncated spectrum. Undefined with
// spectral_sum_divergent when either effective inverse temperature
// beta_c + A or beta_h/eps^2 - A (A = g1/eps^2 + (1 - 1/eps^2) g2) is <= 0,
// where the untruncated sums would diverge.
CgfValue cgf_scale_invariant(double g1, double g2, const ScaleInvariantEngine& engine,
                             const BathPair& baths);

// Brute-force oracle: ln sum_atoms p * exp(g1 q2 + g2 w), not normalized.
CgfValue cgf_from_distribution(double g1, double g2, const JointDistribution& dist);

// Evaluator handle used by the LDF machinery; pure and shareable across threads.
class Cgf {
public:
    using Fn = std::function<CgfValue(double, double)>;

    Cgf(Fn fn, double min_quantum, std::string label)
        : fn_(std::move(fn)), min_quantum_(min_quantum), label_(std::move(label)) {}

    CgfValue operator()(double g1, double g2) const { return fn_(g1, g2); }

    double min_quantum() const noexcept { return min_quantum_; }
    const std::string& label() const noexcept { return label_; }

private:
    Fn fn_;
    double min_quantum_;
    std::string label_;
};

Cgf make_cgf(const TwoLevelEngine& engine, const BathPair& baths);
Cgf make_cgf_linear(const TwoLevelEngine& engine, const BathPair& baths);
Cgf make_cgf(const HarmonicEngine& engine, const BathPair& baths);
Cgf make_cgf_linear(const HarmonicEngine& engine, const BathPair& baths);
Cgf make_cgf(const ScaleInvariantEngine& engine, const BathPair& baths);

// Normalized oracle evaluator over a prebuilt distribution.
Cgf make_cgf(JointDistribution dist, double min_quantum, std::string label = "distribution");

}  // namespace qotto
