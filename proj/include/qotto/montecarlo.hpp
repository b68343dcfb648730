// montecarlo.hpp: single-cycle sampling from the measurement chain, s-cycle
// block aggregation, and the empirical rate-function estimate.

#pragma once

#include <cstdint>
#include <vector>

#include "qotto/engines.hpp"
#include "qotto/joint.hpp"
#include "qotto/rng.hpp"

namespace qotto {

// Stochastic energies of the three strokes of one cycle.
struct CycleSample {
    double w1{0.0};
    double q2{0.0};
    double w3{0.0};

    double work() const noexcept { return w1 + w3; }
};

// Precomputed inverse-CDF tables for one engine. Immutable and shareable.
class CycleSampler {
public:
    CycleSampler(const TwoLevelEngine& engine, const BathPair& baths);
    CycleSampler(const HarmonicEngine& engine, const BathPair& baths, std::size_t n_levels);
    CycleSampler(const ScaleInvariantEngine& engine, const BathPair& baths);  // adiabatic strokes

    CycleSample sample(Xoshiro256StarStar& rng) const;

private:
    std::vector<double> e0_;    // energies of the bare levels
    std::vector<double> etau_;  // energies of the scaled levels
    std::vector<double> cold_cdf_;
    std::vector<double> hot_cdf_;
    std::vector<std::vector<double>> row_cdf_;  // per-level transition CDF (both strokes)
};

struct HistogramConfig {
    double lo{-0.5};
    double hi{1.5};
    std::size_t bins{101};
};

struct BlockEstimate {
    std::size_t s{1};                 // cycles per block
    std::vector<double> eta_values;   // per-block -sum(w)/sum(q2), included blocks only
    HistogramConfig config;
    std::vector<std::size_t> counts;  // per-bin counts of eta_values
    std::size_t excluded{0};          // blocks with sum(q2) <= 0
    std::size_t out_of_range{0};      // included blocks falling outside the window
    std::size_t total_blocks{0};
    std::uint64_t seed{0};
};

// Sample n_blocks blocks of s cycles each. Block b always consumes substream
// b (one jump apart), so results are independent of the thread count.
BlockEstimate sample_blocks(const CycleSampler& sampler, std::size_t s, std::size_t n_blocks,
                            std::uint64_t seed, const HistogramConfig& config = {},
                            int threads = 1);

struct EmpiricalRatePoint {
    double eta_center{0.0};
    std::size_t count{0};
    double rate{0.0};       // -ln(count / included) / s
    double std_error{0.0};  // binomial standard error propagated through -ln(.)/s
};

// Per-bin estimates; empty bins are omitted. Throws when every block was
// excluded.
std::vector<EmpiricalRatePoint> empirical_rate(const BlockEstimate& blocks);

}  // namespace qotto
