// joint.hpp: exact per-cycle joint distributions of heat input and total
// work from the two-projective-measurement chain, the harmonic transition
// matrix, and moment summaries.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qotto/engines.hpp"

namespace qotto {

// One support point of the per-cycle (Q2, W) distribution.
struct Atom {
    double q2{0.0};
    double w{0.0};
    double p{0.0};
};

// Finite list of atoms; tail_mass is the probability excluded by truncation.
// Atoms are sorted by (q2, w) and carry strictly positive weights.
struct JointDistribution {
    std::vector<Atom> atoms;
    double tail_mass{0.0};

    double total_mass() const;
};

// Transition probabilities P_{n->m} of one driving stroke, indices 0..dim-1.
// Rows and columns sum to 1 up to the truncation deficit; the matrix is
// symmetric and vanishes for odd n+m.
class TransitionMatrix {
public:
    TransitionMatrix(std::size_t dim, double q_star)
        : dim_(dim), q_star_(q_star), p_(dim * dim, 0.0) {}

    std::size_t dim() const noexcept { return dim_; }
    double q_star() const noexcept { return q_star_; }

    double operator()(std::size_t n, std::size_t m) const { return p_[n * dim_ + m]; }
    double& entry(std::size_t n, std::size_t m) { return p_[n * dim_ + m]; }

    double row_sum(std::size_t n) const;
    double col_sum(std::size_t m) const;

private:
    std::size_t dim_;
    double q_star_;
    std::vector<double> p_;
};

struct MomentSummary {
    double mean_q2{0.0};
    double mean_w{0.0};
    double var_q2{0.0};
    double var_w{0.0};
    double cov_qw{0.0};
    std::optional<double> pearson;           // unset when either variance vanishes
    std::optional<double> eta_macroscopic;   // -mean_w/mean_q2, unset when mean_q2 == 0
};

// Taylor coefficients of sqrt(2/R(u,v)) with the S13 radicand
// R = q*(1-u^2)(1-v^2) + (1+u^2)(1+v^2) - 4uv, extracted by truncated
// series arithmetic. q_star == 1 collapses to the identity (R = 2(1-uv)^2).
// Entries more negative than -1e-12 indicate lost precision and throw.
TransitionMatrix harmonic_transitions(double q_star, std::size_t n_levels);

// Exact 16-path enumeration of the two-level cycle, merged to 9 atoms.
JointDistribution build_joint_two_level(const TwoLevelEngine& engine, const BathPair& baths);

// Harmonic cycle over n_levels levels; tail_mass combines the Gibbs
// truncation, the transition-matrix row deficits, and per-stroke paths below
// prune_floor. Pass prune_floor = 0 to keep every representable path, which
// distributions backing far-argument CGF oracles need.
JointDistribution build_joint_harmonic(const HarmonicEngine& engine, const BathPair& baths,
                                       std::size_t n_levels, double tail_tol = 1e-10,
                                       double prune_floor = 1e-18);

// Adiabatic scale-invariant cycle: every atom sits on W = -(1 - eps_tau^2) Q2.
JointDistribution build_joint_adiabatic_scale_invariant(const ScaleInvariantEngine& engine,
                                                        const BathPair& baths);

MomentSummary moments(const JointDistribution& dist);

// Columns q2,w,p with 17 significant digits.
void write_csv(const JointDistribution& dist, std::ostream& os);

}  // namespace qotto
