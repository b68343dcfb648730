#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "qotto/joint.hpp"
#include "qotto/montecarlo.hpp"

using namespace qotto;

namespace {

const BathPair fig_baths{3.0, 0.1};

}  // namespace

TEST_CASE("identical seeds give identical streams and estimates") {
    const CycleSampler sampler(TwoLevelEngine(1.0, 2.0, 0.95), fig_baths);
    const BlockEstimate a = sample_blocks(sampler, 10, 500, 42);
    const BlockEstimate b = sample_blocks(sampler, 10, 500, 42);
    CHECK(a.eta_values == b.eta_values);
    CHECK(a.counts == b.counts);
    CHECK(a.excluded == b.excluded);

    // thread count must not change the outcome
    const BlockEstimate c = sample_blocks(sampler, 10, 500, 42, {}, 3);
    CHECK(a.eta_values == c.eta_values);

    const BlockEstimate d = sample_blocks(sampler, 10, 500, 43);
    CHECK(a.eta_values != d.eta_values);
}

TEST_CASE("adiabatic samples sit on the deterministic efficiency line") {
    const TwoLevelEngine engine(1.0, 2.0, 1.0);
    const CycleSampler sampler(engine, fig_baths);
    const double eta_th = 0.5;
    Xoshiro256StarStar rng(99);
    for (int i = 0; i < 20000; ++i) {
        const CycleSample s = sampler.sample(rng);
        CHECK(std::abs(s.work() + eta_th * s.q2) < 1e-12 * (1.0 + std::abs(s.q2)));
    }
}

TEST_CASE("sampled frequencies match the joint distribution within 4 sigma") {
    const TwoLevelEngine engine(1.0, 2.0, 0.95);
    const JointDistribution dist = build_joint_two_level(engine, fig_baths);
    const CycleSampler sampler(engine, fig_baths);

    const std::size_t n = 1000000;
    std::map<std::pair<long, long>, std::size_t> freq;
    Xoshiro256StarStar rng(1234);
    for (std::size_t i = 0; i < n; ++i) {
        const CycleSample s = sampler.sample(rng);
        freq[{std::lround(s.q2 * 64.0), std::lround(s.work() * 64.0)}]++;
    }
    for (const Atom& a : dist.atoms) {
        const auto it = freq.find({std::lround(a.q2 * 64.0), std::lround(a.w * 64.0)});
        const double observed = (it == freq.end()) ? 0.0 : static_cast<double>(it->second);
        const double sigma = std::sqrt(a.p * (1.0 - a.p) * static_cast<double>(n));
        CHECK(std::abs(observed - a.p * static_cast<double>(n)) <= 4.0 * sigma + 1.0);
    }
    CHECK(freq.size() == dist.atoms.size());
}

TEST_CASE("cold bath at near-zero temperature pins the initial state") {
    const TwoLevelEngine engine(1.0, 2.0, 0.95);
    const BathPair cold(1e3, 0.1);
    const CycleSampler sampler(engine, cold);
    Xoshiro256StarStar rng(5);
    std::size_t ground = 0;
    const std::size_t n = 50000;
    for (std::size_t i = 0; i < n; ++i) {
        const CycleSample s = sampler.sample(rng);
        // starting from the ground state, w1 = E_m^tau + nu0, i.e. -1 or 3
        if (std::abs(s.w1 + 1.0) < 1e-9 || std::abs(s.w1 - 3.0) < 1e-9) ++ground;
    }
    CHECK(ground == n);
}

TEST_CASE("sample moments converge at the Monte Carlo rate") {
    const TwoLevelEngine engine(1.0, 2.0, 0.95);
    const JointDistribution dist = build_joint_two_level(engine, fig_baths);
    const MomentSummary m = moments(dist);
    const CycleSampler sampler(engine, fig_baths);

    auto mean_abs_error = [&](std::size_t n_samples, std::uint64_t seed0) {
        double acc = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
            Xoshiro256StarStar rng(seed0 + rep);
            double sq = 0.0, sw = 0.0;
            for (std::size_t i = 0; i < n_samples; ++i) {
                const CycleSample s = sampler.sample(rng);
                sq += s.q2;
                sw += s.work();
            }
            const double dq = sq / n_samples - m.mean_q2;
            const double dw = sw / n_samples - m.mean_w;
            acc += std::hypot(dq, dw);
        }
        return acc / 8.0;
    };
    const double err_small = mean_abs_error(10000, 210);
    const double err_big = mean_abs_error(1000000, 7100);
    const double ratio = err_small / err_big;
    CHECK(ratio > 10.0 / 3.0);
    CHECK(ratio < 30.0);
}

TEST_CASE("block aggregation and the empirical rate") {
    const TwoLevelEngine engine(1.0, 2.0, 0.95);
    const CycleSampler sampler(engine, fig_baths);

    const BlockEstimate blocks = sample_blocks(sampler, 20, 20000, 2024);
    std::size_t binned = 0;
    for (std::size_t c : blocks.counts) binned += c;
    CHECK(binned + blocks.out_of_range == blocks.eta_values.size());
    CHECK(blocks.eta_values.size() + blocks.excluded == blocks.total_blocks);

    const auto rate = empirical_rate(blocks);
    CHECK_FALSE(rate.empty());
    for (const auto& p : rate) {
        CHECK(p.count > 0);
        CHECK(p.rate >= 0.0);
        CHECK(p.std_error > 0.0);
    }

    // At s = 20 the most populated bin is the lattice spike of fully
    // transition-free blocks, which sit exactly on the adiabatic efficiency
    // 0.5 (weight u^(4s) ~ 0.13); the smooth bulk peaks at the macroscopic
    // efficiency and takes over only for larger s.
    const double eta_th = *moments(build_joint_two_level(engine, fig_baths)).eta_macroscopic;
    std::size_t best = 0;
    for (std::size_t i = 1; i < blocks.counts.size(); ++i) {
        if (blocks.counts[i] > blocks.counts[best]) best = i;
    }
    const double width = (blocks.config.hi - blocks.config.lo) / blocks.config.bins;
    CHECK(std::abs(blocks.config.lo + (best + 0.5) * width - 0.5) <= 0.5 * width);
    const auto bin_of = [&](double eta) {
        return static_cast<std::size_t>((eta - blocks.config.lo) / width);
    };
    CHECK(blocks.counts[bin_of(eta_th)] > 1000);  // the bulk peak is where J vanishes
}

TEST_CASE("adiabatic blocks all land in the deterministic bin") {
    const TwoLevelEngine engine(1.0, 2.0, 1.0);
    const CycleSampler sampler(engine, fig_baths);
    for (const std::size_t s : {std::size_t{1}, std::size_t{7}}) {
        const BlockEstimate blocks = sample_blocks(sampler, s, 4000, 31 + s);
        std::size_t binned = 0, nonzero_bins = 0, best = 0;
        for (std::size_t i = 0; i < blocks.counts.size(); ++i) {
            binned += blocks.counts[i];
            if (blocks.counts[i] > 0) {
                ++nonzero_bins;
                best = i;
            }
        }
        CHECK(nonzero_bins == 1);
        CHECK(binned == blocks.eta_values.size());
        const double width = (blocks.config.hi - blocks.config.lo) / blocks.config.bins;
        const double center = blocks.config.lo + (best + 0.5) * width;
        CHECK(std::abs(center - 0.5) <= 0.5 * width + 1e-12);
    }
}

TEST_CASE("estimation error when every block is excluded") {
    BlockEstimate empty;
    empty.s = 5;
    empty.total_blocks = 10;
    empty.excluded = 10;
    empty.counts.assign(101, 0);
    CHECK_THROWS_AS(empirical_rate(empty), std::runtime_error);
}

TEST_CASE("harmonic and scale-invariant samplers match their distributions") {
    SUBCASE("harmonic sample moments within 5 sigma") {
        const HarmonicEngine engine(1.0, 2.0, 1.2);
        const JointDistribution dist = build_joint_harmonic(engine, fig_baths, 192, 1e-8);
        const MomentSummary m = moments(dist);
        const CycleSampler sampler(engine, fig_baths, 192);
        Xoshiro256StarStar rng(8086);
        const std::size_t n = 200000;
        double sq = 0.0, sw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const CycleSample s = sampler.sample(rng);
            sq += s.q2;
            sw += s.work();
        }
        CHECK(std::abs(sq / n - m.mean_q2) < 5.0 * std::sqrt(m.var_q2 / n));
        CHECK(std::abs(sw / n - m.mean_w) < 5.0 * std::sqrt(m.var_w / n));
    }

    SUBCASE("scale-invariant samples sit on the anticorrelation line") {
        const ScaleInvariantEngine engine({0.3, 1.1, 1.9, 2.4}, 0.37);
        const CycleSampler sampler(engine, fig_baths);
        const double eta_th = 1.0 - engine.eps_tau_sq;
        Xoshiro256StarStar rng(515);
        for (int i = 0; i < 5000; ++i) {
            const CycleSample s = sampler.sample(rng);
            CHECK(std::abs(s.work() + eta_th * s.q2) < 1e-12 * (1.0 + std::abs(s.q2)));
        }
    }
}
