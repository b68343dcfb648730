#include "qotto/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qotto/parallel.hpp"

namespace qotto {

namespace {

std::vector<double> cdf_from_weights(const std::vector<double>& w) {
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        cdf[i] = acc;
    }
    // Normalize so the last entry is exactly 1 (rows may carry a truncation
    // deficit).
    for (double& c : cdf) c /= acc;
    cdf.back() = 1.0;
    return cdf;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                             static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace

CycleSampler::CycleSampler(const TwoLevelEngine& engine, const BathPair& baths) {
    e0_ = {-engine.nu0, engine.nu0};
    etau_ = {-engine.nu_tau, engine.nu_tau};
    const auto [cold, hot] = thermal_weights(engine, baths);
    cold_cdf_ = cdf_from_weights(cold);
    hot_cdf_ = cdf_from_weights(hot);
    row_cdf_ = {cdf_from_weights({engine.u, 1.0 - engine.u}),
                cdf_from_weights({1.0 - engine.u, engine.u})};
}

CycleSampler::CycleSampler(const HarmonicEngine& engine, const BathPair& baths,
                           std::size_t n_levels) {
    const TransitionMatrix t = harmonic_transitions(engine.q_star, n_levels);
    e0_.resize(n_levels);
    etau_.resize(n_levels);
    for (std::size_t n = 0; n < n_levels; ++n) {
        e0_[n] = engine.omega0 * (static_cast<double>(n) + 0.5);
        etau_[n] = engine.omega_tau * (static_cast<double>(n) + 0.5);
    }
    const auto [cold, hot] = thermal_weights(engine, baths, n_levels, 1e-9);
    cold_cdf_ = cdf_from_weights(cold);
    hot_cdf_ = cdf_from_weights(hot);
    row_cdf_.reserve(n_levels);
    for (std::size_t n = 0; n < n_levels; ++n) {
        std::vector<double> row(n_levels);
        for (std::size_t m = 0; m < n_levels; ++m) row[m] = t(n, m);
        row_cdf_.push_back(cdf_from_weights(row));
    }
}

CycleSampler::CycleSampler(const ScaleInvariantEngine& engine, const BathPair& baths) {
    e0_ = engine.spectrum;
    etau_ = engine.scaled_spectrum();
    const auto [cold, hot] = thermal_weights(engine, baths);
    cold_cdf_ = cdf_from_weights(cold);
    hot_cdf_ = cdf_from_weights(hot);
    // adiabatic driving: no level transitions
    row_cdf_.resize(e0_.size());
    for (std::size_t i = 0; i < e0_.size(); ++i) {
        std::vector<double> row(e0_.size(), 0.0);
        row[i] = 1.0;
        row_cdf_[i] = cdf_from_weights(row);
    }
}

CycleSample CycleSampler::sample(Xoshiro256StarStar& rng) const {
    const std::size_t n = draw(cold_cdf_, rng.uniform01());
    const std::size_t m = draw(row_cdf_[n], rng.uniform01());
    const std::size_t k = draw(hot_cdf_, rng.uniform01());
    const std::size_t l = draw(row_cdf_[k], rng.uniform01());
    return {etau_[m] - e0_[n], etau_[k] - etau_[m], e0_[l] - etau_[k]};
}

BlockEstimate sample_blocks(const CycleSampler& sampler, std::size_t s, std::size_t n_blocks,
                            std::uint64_t seed, const HistogramConfig& config, int threads) {
    if (s < 1) throw std::invalid_argument("sample_blocks: need s >= 1");
    if (config.bins < 1 || !(config.hi > config.lo)) {
        throw std::invalid_argument("sample_blocks: bad histogram window");
    }

    // One jumped substream per block; the jump chain is laid out up front so
    // block b sees the same stream regardless of threading.
    std::vector<Xoshiro256StarStar> streams;
    streams.reserve(n_blocks);
    Xoshiro256StarStar master(seed);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        streams.push_back(master);
        master.jump();
    }

    constexpr double kExcluded = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> eta(n_blocks, kExcluded);
    parallel_for(n_blocks, threads, [&](std::size_t b) {
        Xoshiro256StarStar rng = streams[b];
        double sum_q2 = 0.0, sum_w = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            const CycleSample c = sampler.sample(rng);
            sum_q2 += c.q2;
            sum_w += c.work();
        }
        if (sum_q2 > 0.0) {
            eta[b] = -sum_w / sum_q2;
        }
    });

    BlockEstimate est;
    est.s = s;
    est.config = config;
    est.counts.assign(config.bins, 0);
    est.total_blocks = n_blocks;
    est.seed = seed;
    const double width = (config.hi - config.lo) / static_cast<double>(config.bins);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        if (std::isnan(eta[b])) {
            ++est.excluded;
            continue;
        }
        est.eta_values.push_back(eta[b]);
        const double x = (eta[b] - config.lo) / width;
        if (x < 0.0 || x >= static_cast<double>(config.bins)) {
            ++est.out_of_range;
            continue;
        }
        ++est.counts[static_cast<std::size_t>(x)];
    }
    return est;
}

std::vector<EmpiricalRatePoint> empirical_rate(const BlockEstimate& blocks) {
    const std::size_t included = blocks.eta_values.size();
    if (included == 0) {
        throw std::runtime_error("empirical_rate: all blocks were excluded (sum q2 <= 0)");
    }
    const double width = (blocks.config.hi - blocks.config.lo) / static_cast<double>(blocks.config.bins);
    std::vector<EmpiricalRatePoint> out;
    for (std::size_t bin = 0; bin < blocks.counts.size(); ++bin) {
        const std::size_t count = blocks.counts[bin];
        if (count == 0) continue;
        const double p = static_cast<double>(count) / static_cast<double>(included);
        EmpiricalRatePoint pt;
        pt.eta_center = blocks.config.lo + width * (static_cast<double>(bin) + 0.5);
        pt.count = count;
        pt.rate = -std::log(p) / static_cast<double>(blocks.s);
        pt.std_error = std::sqrt((1.0 - p) / (p * static_cast<double>(included))) /
                       static_cast<double>(blocks.s);
        out.push_back(pt);
    }
    return out;
}

}  // namespace qotto
