#include "qotto/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "qotto/cgf.hpp"
#include "qotto/io.hpp"
#include "qotto/joint.hpp"
#include "qotto/ldf.hpp"
#include "qotto/montecarlo.hpp"
#include "qotto/rng.hpp"

namespace qotto::cli {

namespace {

using nlohmann::ordered_json;

struct EngineContext {
    std::string name;
    Cgf cgf;                    // per configured regime
    std::optional<Cgf> exact;   // exact counterpart when the regime is not exact
    double min_quantum;
};

BathPair baths_of(const RunConfig& c) { return {c.beta_c, c.beta_h}; }

TwoLevelEngine two_level_of(const RunConfig& c, Regime regime) {
    return {c.nu0, c.nu_tau, regime == Regime::adiabatic ? 1.0 : c.u};
}

HarmonicEngine harmonic_of(const RunConfig& c, Regime regime) {
    return {c.omega0, c.omega_tau, regime == Regime::adiabatic ? 1.0 : c.q_star};
}

ScaleInvariantEngine scale_invariant_of(const RunConfig& c) {
    return {c.spectrum, c.eps_tau_sq};
}

EngineContext make_context(const RunConfig& c, const std::string& name) {
    const BathPair baths = baths_of(c);
    if (name == "two_level") {
        const TwoLevelEngine engine = two_level_of(c, c.regime);
        Cgf cgf = (c.regime == Regime::linear) ? make_cgf_linear(engine, baths)
                                               : make_cgf(engine, baths);
        std::optional<Cgf> exact;
        if (c.regime == Regime::linear) exact = make_cgf(engine, baths);
        return {name, std::move(cgf), std::move(exact), 2.0 * engine.nu0};
    }
    if (name == "harmonic") {
        const HarmonicEngine engine = harmonic_of(c, c.regime);
        Cgf cgf = (c.regime == Regime::linear) ? make_cgf_linear(engine, baths)
                                               : make_cgf(engine, baths);
        std::optional<Cgf> exact;
        if (c.regime == Regime::linear) exact = make_cgf(engine, baths);
        return {name, std::move(cgf), std::move(exact), engine.omega0};
    }
    const ScaleInvariantEngine engine = scale_invariant_of(c);
    return {name, make_cgf(engine, baths), std::nullopt, 0.0};
}

// Macroscopic efficiency -<W>/<Q2> read off the CGF gradient at the origin;
// works uniformly for every regime.
double eta_th_of(const Cgf& cgf, double min_quantum) {
    const double h = 1e-4 / std::max(min_quantum, 1e-3);
    auto d = [&](int axis) {
        auto f = [&](double t) {
            return cgf(axis == 0 ? t : 0.0, axis == 1 ? t : 0.0).value;
        };
        return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
    };
    const double mean_q2 = d(0);
    const double mean_w = d(1);
    return -mean_w / mean_q2;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

// Second-derivative (Hessian) Pearson coefficient of a CGF at the origin,
// O(h^4) stencils plus one Richardson level.
double pearson_from_cgf(const Cgf& cgf, double min_quantum) {
    const double h = 8e-3 / std::max(min_quantum, 1e-3);
    auto f = [&](double a, double b) { return cgf(a, b).value; };
    auto second4 = [&](int axis, double step) {
        auto g = [&](double t) { return f(axis == 0 ? t : 0.0, axis == 1 ? t : 0.0); };
        return (-g(2.0 * step) + 16.0 * g(step) - 30.0 * g(0.0) + 16.0 * g(-step) -
                g(-2.0 * step)) /
               (12.0 * step * step);
    };
    auto second = [&](int axis) {
        return (16.0 * second4(axis, h / 2.0) - second4(axis, h)) / 15.0;
    };
    auto cross2 = [&](double step) {
        return (f(step, step) + f(-step, -step) - f(step, -step) - f(-step, step)) /
               (4.0 * step * step);
    };
    auto cross = [&](double step) { return (4.0 * cross2(step / 2.0) - cross2(step)) / 3.0; };
    const double var_q = second(0);
    const double var_w = second(1);
    const double cov = (16.0 * cross(h / 2.0) - cross(h)) / 15.0;
    const double rho = cov / std::sqrt(var_q * var_w);
    return std::clamp(rho, -1.0, 1.0);
}

// Ray-margin test: the whole scaled segment through the point stays inside
// the harmonic domain with slack, which bounds the truncated oracle's
// reweighted tail (positive series coefficients, Cauchy bound).
bool harmonic_margin_ok(double g1, double g2, const HarmonicEngine& e, const BathPair& b,
                        double log_margin) {
    const double lu0 = -e.omega0 * (b.beta_c + g2) + log_margin;
    const double lv0 = e.omega_tau * (g2 - g1) + log_margin;
    const double lx0 = -b.beta_h * e.omega_tau + e.omega_tau * (g1 - g2) + log_margin;
    const double ly0 = e.omega0 * g2 + log_margin;
    if (lu0 + lv0 >= 0.0 || lx0 + ly0 >= 0.0) return false;
    auto radicand = [&e](double la, double lb) {
        const double a = std::exp(la), bb = std::exp(lb);
        return e.q_star * (1 - a * a) * (1 - bb * bb) + (1 + a * a) * (1 + bb * bb) - 4 * a * bb;
    };
    return radicand(lu0, lv0) > 1e-3 && radicand(lx0, ly0) > 1e-3;
}

// Deterministic in-domain sample points for oracle verification.
template <typename Admissible>
std::vector<std::pair<double, double>> verification_points(Admissible admissible,
                                                           std::size_t count) {
    std::vector<std::pair<double, double>> pts;
    Xoshiro256StarStar rng(977001);
    int guard = 0;
    while (pts.size() < count && guard < 100000) {
        ++guard;
        const double g1 = 2.0 * rng.uniform01() - 1.0;
        const double g2 = 2.0 * rng.uniform01() - 1.0;
        if (!admissible(g1, g2)) continue;
        pts.emplace_back(g1, g2);
    }
    return pts;
}

// Cross-check an analytic CGF against the enumeration oracle.
template <typename Admissible>
bool verify_against_oracle(const Cgf& analytic, const JointDistribution& dist, double tol,
                           const std::string& label, Admissible admissible) {
    const Cgf oracle = make_cgf(dist, 1.0, "oracle");
    double worst = 0.0;
    for (const auto& [g1, g2] : verification_points(admissible, 60)) {
        const CgfValue a = analytic(g1, g2);
        const CgfValue b = oracle(g1, g2);
        if (!a.is_finite() || !b.is_finite()) continue;
        worst = std::max(worst, std::abs(a.value - b.value));
    }
    if (worst > tol) {
        std::cerr << "verification failed: " << label << " deviates from the oracle by " << worst
                  << " (tolerance " << tol << ")\n";
        return false;
    }
    std::cout << "verified " << label << ": max oracle deviation " << worst << "\n";
    return true;
}

bool verify_engine_oracles(const RunConfig& c, const std::string& name) {
    const BathPair baths = baths_of(c);
    if (name == "two_level") {
        const TwoLevelEngine engine = two_level_of(c, c.regime);
        return verify_against_oracle(make_cgf(engine, baths), build_joint_two_level(engine, baths),
                                     1e-10, "two_level exact CGF",
                                     [](double, double) { return true; });
    }
    if (name == "harmonic") {
        const HarmonicEngine engine = harmonic_of(c, c.regime);
        const std::size_t n = std::max<std::size_t>(c.n_levels, 256);
        return verify_against_oracle(make_cgf(engine, baths),
                                     build_joint_harmonic(engine, baths, n, 1e-6, 0.0), 1e-8,
                                     "harmonic exact CGF", [&](double g1, double g2) {
                                         return harmonic_margin_ok(g1, g2, engine, baths,
                                                                   std::log(1.3));
                                     });
    }
    const ScaleInvariantEngine engine = scale_invariant_of(c);
    const Cgf cgf = make_cgf(engine, baths);
    return verify_against_oracle(cgf, build_joint_adiabatic_scale_invariant(engine, baths), 1e-10,
                                 "scale_invariant CGF", [&](double g1, double g2) {
                                     return cgf(1.25 * g1, 1.25 * g2).is_finite();
                                 });
}

const char* kPearsonPlot = R"(#!/usr/bin/env python3
"""Plot work-heat Pearson coefficients produced by 'qotto pearson'."""
import glob
import matplotlib.pyplot as plt


def read_csv(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip() or line[0].isalpha():
                continue
            rows.append([float(x) for x in line.split(",")])
    return list(zip(*rows))


styles = {"two_level": "-", "harmonic": "-.", "scale_invariant": ":"}
for path in sorted(glob.glob("pearson_*.csv")):
    name = path[len("pearson_"):-len(".csv")]
    q_star, rho = read_csv(path)
    plt.plot(q_star, rho, styles.get(name, "-"), label=name)
plt.xlabel(r"$Q^*$")
plt.ylabel(r"$\rho$")
plt.legend()
plt.tight_layout()
plt.savefig("pearson.png", dpi=160)
print("wrote pearson.png")
)";

const char* kLdfPlot = R"(#!/usr/bin/env python3
"""Plot efficiency large-deviation curves produced by 'qotto ldf'."""
import glob
import matplotlib.pyplot as plt
import numpy as np

for path in sorted(glob.glob("ldf_*.csv")):
    label = path[len("ldf_"):-len(".csv")]
    eta, j = [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("eta"):
                continue
            e, val, _status = line.strip().split(",")
            eta.append(float(e))
            j.append(float(val))
    eta = np.array(eta)
    j = np.array(j)
    finite = np.isfinite(j)
    plt.plot(eta[finite], j[finite], label=label)
    if (~finite).any():
        plt.plot(eta[~finite], np.full((~finite).sum(), np.nanmax(j[finite]) * 1.1), "x")
plt.xlabel(r"$\eta$")
plt.ylabel(r"$J(\eta)$")
plt.legend()
plt.tight_layout()
plt.savefig("ldf.png", dpi=160)
print("wrote ldf.png")
)";

const char* kContourPlot = R"(#!/usr/bin/env python3
"""Plot CGF contour grids produced by 'qotto contour'."""
import glob
import json
import matplotlib.pyplot as plt
import numpy as np

for path in sorted(glob.glob("contour_*.json")):
    with open(path) as fh:
        doc = json.load(fh)
    g1 = np.array(doc["gamma1_axis"])
    g2 = np.array(doc["gamma2_axis"])
    vals = np.array([np.nan if v is None else v for v in doc["values"]])
    grid = vals.reshape(len(g1), len(g2))
    plt.figure()
    plt.contourf(g2, g1, grid, levels=30)
    plt.colorbar(label=r"$\phi(\gamma_1,\gamma_2)$")
    plt.xlabel(r"$\gamma_2$")
    plt.ylabel(r"$\gamma_1$")
    out = path.replace(".json", ".png")
    plt.tight_layout()
    plt.savefig(out, dpi=160)
    print("wrote", out)
)";

const char* kSamplePlot = R"(#!/usr/bin/env python3
"""Plot Monte Carlo histograms and empirical rates from 'qotto sample'."""
import glob
import matplotlib.pyplot as plt


def read_csv(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip() or line[0].isalpha():
                continue
            rows.append([float(x) for x in line.split(",")])
    return list(zip(*rows))


fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
for path in sorted(glob.glob("histogram_*.csv")):
    eta, count = read_csv(path)
    ax1.step(eta, count, where="mid", label=path)
for path in sorted(glob.glob("empirical_rate_*.csv")):
    eta, _count, rate, std_error = read_csv(path)
    ax2.errorbar(eta, rate, yerr=std_error, fmt=".", label=path)
ax1.set_ylabel("count")
ax2.set_ylabel(r"$-\ln \hat p / s$")
ax2.set_xlabel(r"$\eta$")
ax1.legend()
ax2.legend()
plt.tight_layout()
plt.savefig("sample.png", dpi=160)
print("wrote sample.png")
)";

}  // namespace

int cmd_pearson(const RunConfig& config) {
    const BathPair baths = baths_of(config);
    const auto provenance = config.provenance(kVersion);

    for (const std::string& name : config.engines) {
        if (name == "scale_invariant") {
            // adiabatic by construction: a single perfectly anticorrelated point
            const auto m = moments(build_joint_adiabatic_scale_invariant(
                scale_invariant_of(config), baths));
            std::vector<std::vector<std::string>> rows;
            rows.push_back({io::format_g17(1.0), io::format_g17(m.pearson.value_or(-1.0))});
            io::write_csv(config.out_dir / "pearson_scale_invariant.csv", provenance, "q_star,rho",
                          rows);
            std::cout << "wrote " << (config.out_dir / "pearson_scale_invariant.csv").string()
                      << "\n";
            continue;
        }
        std::vector<std::vector<std::string>> rows;
        for (const double q : linspace(config.qstar_min, config.qstar_max, config.qstar_points)) {
            std::optional<double> rho;
            if (name == "two_level") {
                if (q < -1.0 || q > 1.0) continue;
                const TwoLevelEngine engine(config.nu0, config.nu_tau, (q + 1.0) / 2.0);
                rho = pearson_from_cgf(make_cgf(engine, baths), 2.0 * engine.nu0);
            } else {
                if (q < 1.0) continue;
                const HarmonicEngine engine(config.omega0, config.omega_tau, q);
                rho = pearson_from_cgf(make_cgf(engine, baths), engine.omega0);
            }
            rows.push_back({io::format_g17(q), io::format_g17(*rho)});
        }
        if (rows.empty()) {
            std::cerr << "pearson: q_star sweep [" << config.qstar_min << ", " << config.qstar_max
                      << "] has no points in range for engine " << name << "\n";
            return 3;
        }
        const auto path = config.out_dir / ("pearson_" + name + ".csv");
        io::write_csv(path, provenance, "q_star,rho", rows);
        std::cout << "wrote " << path.string() << "\n";
    }
    io::write_text(config.out_dir / "plot_pearson.py", kPearsonPlot);

    if (config.verify) {
        // dual route: CGF Hessian (used above) against the joint-module moments
        for (const std::string& name : config.engines) {
            if (name == "two_level") {
                const TwoLevelEngine engine = two_level_of(config, Regime::exact);
                const auto m = moments(build_joint_two_level(engine, baths));
                const double rho = pearson_from_cgf(make_cgf(engine, baths), 2.0 * engine.nu0);
                if (!m.pearson || std::abs(rho - *m.pearson) > 1e-6) {
                    std::cerr << "verification failed: two_level pearson routes disagree\n";
                    return 4;
                }
            } else if (name == "harmonic") {
                const HarmonicEngine engine = harmonic_of(config, Regime::exact);
                const auto m =
                    moments(build_joint_harmonic(engine, baths, std::max<std::size_t>(config.n_levels, 256), 1e-6));
                const double rho = pearson_from_cgf(make_cgf(engine, baths), engine.omega0);
                if (!m.pearson || std::abs(rho - *m.pearson) > 1e-4) {
                    std::cerr << "verification failed: harmonic pearson routes disagree\n";
                    return 4;
                }
            }
            if (!verify_engine_oracles(config, name)) return 4;
        }
        std::cout << "verified pearson moment routes\n";
    }
    return 0;
}

int cmd_ldf(const RunConfig& config) {
    const auto provenance = config.provenance(kVersion);
    const auto grid = linspace(config.eta_min, config.eta_max, config.eta_points);
    const double eta_ca = baths_of(config).eta_carnot();

    for (const std::string& name : config.engines) {
        const EngineContext ctx = make_context(config, name);

        struct Variant {
            const Cgf* cgf;
            std::string suffix;
        };
        std::vector<Variant> variants{{&ctx.cgf, to_string(config.regime)}};
        if (ctx.exact) variants.push_back({&*ctx.exact, "exact"});

        for (const Variant& variant : variants) {
            const double eta_th = eta_th_of(*variant.cgf, ctx.min_quantum);
            SearchConfig search;
            search.threads = config.threads;
            const RateFunctionCurve curve = rate_curve(*variant.cgf, grid, search, eta_th, eta_ca);

            std::vector<std::string> head = provenance;
            head.push_back("eta_th = " + io::format_g17(curve.eta_th));
            head.push_back("eta_ca = " + io::format_g17(curve.eta_ca));
            head.push_back(std::string("degenerate = ") + (curve.degenerate ? "true" : "false"));
            std::vector<std::vector<std::string>> rows;
            rows.reserve(curve.points.size());
            for (const RateFunctionPoint& p : curve.points) {
                rows.push_back({io::format_g17(p.eta), io::format_g17(p.j), to_string(p.status)});
            }
            const auto path = config.out_dir / ("ldf_" + name + "_" + variant.suffix + ".csv");
            io::write_csv(path, head, "eta,j,status", rows);
            std::cout << "wrote " << path.string() << "\n";

            if (config.verify && !curve.degenerate) {
                // contraction cross-check on a short eta subgrid
                for (const double eta : linspace(config.eta_min, config.eta_max, 5)) {
                    const double direct = rate_function(*variant.cgf, eta, search).j;
                    const double via_legendre = rate_function_contraction(*variant.cgf, eta);
                    if (std::isfinite(direct) && std::abs(direct - via_legendre) > 1e-4) {
                        std::cerr << "verification failed: contraction route deviates at eta=" << eta
                                  << " (" << direct << " vs " << via_legendre << ")\n";
                        return 4;
                    }
                }
            }
        }
    }
    io::write_text(config.out_dir / "plot_ldf.py", kLdfPlot);
    if (config.verify) {
        for (const std::string& name : config.engines) {
            if (!verify_engine_oracles(config, name)) return 4;
        }
        std::cout << "verified ldf contraction and oracle routes\n";
    }
    return 0;
}

int cmd_contour(const RunConfig& config) {
    const auto provenance = config.provenance(kVersion);
    for (const std::string& name : config.engines) {
        const EngineContext ctx = make_context(config, name);
        const ContourGrid grid =
            contour_grid(ctx.cgf, {config.gamma1_min, config.gamma1_max, config.gamma2_min,
                                   config.gamma2_max},
                         config.gamma1_points, config.gamma2_points, config.threads);
        const double eta_th = eta_th_of(ctx.cgf, ctx.min_quantum);
        const bool degenerate = degeneracy_check(ctx.cgf, eta_th);

        ordered_json doc;
        doc["version"] = kVersion;
        doc["provenance"] = provenance;
        doc["engine"] = name;
        doc["regime"] = to_string(config.regime);
        doc["gamma1_axis"] = grid.gamma1_axis;
        doc["gamma2_axis"] = grid.gamma2_axis;
        ordered_json values = ordered_json::array();
        ordered_json mask = ordered_json::array();
        std::size_t undefined_cells = 0;
        for (const CgfValue& v : grid.values) {  // row-major over (gamma1, gamma2)
            if (v.is_finite()) {
                values.push_back(v.value);
                mask.push_back(0);
            } else {
                values.push_back(nullptr);
                mask.push_back(1);
                ++undefined_cells;
            }
        }
        doc["values"] = std::move(values);
        doc["undefined_mask"] = std::move(mask);
        doc["metadata"] = {{"eta_th", eta_th},
                           {"eta_ca", baths_of(config).eta_carnot()},
                           {"degenerate", degenerate},
                           {"undefined_cells", undefined_cells}};

        const auto path =
            config.out_dir / ("contour_" + name + "_" + to_string(config.regime) + ".json");
        io::write_text(path, doc.dump(2) + "\n");
        std::cout << "wrote " << path.string() << "\n";
    }
    io::write_text(config.out_dir / "plot_contour.py", kContourPlot);
    if (config.verify) {
        for (const std::string& name : config.engines) {
            if (!verify_engine_oracles(config, name)) return 4;
        }
        std::cout << "verified contour oracle routes\n";
    }
    return 0;
}

int cmd_sample(const RunConfig& config) {
    const BathPair baths = baths_of(config);
    auto provenance = config.provenance(kVersion);

    for (const std::string& name : config.engines) {
        std::optional<CycleSampler> sampler;
        MomentSummary reference{};
        if (name == "two_level") {
            const TwoLevelEngine engine = two_level_of(config, config.regime);
            sampler.emplace(engine, baths);
            reference = moments(build_joint_two_level(engine, baths));
        } else if (name == "harmonic") {
            const HarmonicEngine engine = harmonic_of(config, config.regime);
            const std::size_t n = config.n_levels ? config.n_levels : 256;
            sampler.emplace(engine, baths, n);
            reference = moments(build_joint_harmonic(engine, baths, n, std::max(config.tolerance, 1e-9)));
        } else {
            const ScaleInvariantEngine engine = scale_invariant_of(config);
            sampler.emplace(engine, baths);
            reference = moments(build_joint_adiabatic_scale_invariant(engine, baths));
        }

        HistogramConfig hist;
        hist.lo = config.eta_min;
        hist.hi = config.eta_max;
        hist.bins = config.bins;
        const BlockEstimate blocks = sample_blocks(*sampler, config.cycles_per_block, config.blocks,
                                                   config.seed, hist, config.threads);

        std::vector<std::string> head = provenance;
        head.push_back("engine = " + name);
        head.push_back("excluded_blocks = " + std::to_string(blocks.excluded));
        head.push_back("out_of_range_blocks = " + std::to_string(blocks.out_of_range));

        const double width = (hist.hi - hist.lo) / static_cast<double>(hist.bins);
        std::vector<std::vector<std::string>> hist_rows;
        for (std::size_t i = 0; i < blocks.counts.size(); ++i) {
            hist_rows.push_back({io::format_g17(hist.lo + (i + 0.5) * width),
                                 std::to_string(blocks.counts[i])});
        }
        const auto hist_path = config.out_dir / ("histogram_" + name + ".csv");
        io::write_csv(hist_path, head, "eta,count", hist_rows);
        std::cout << "wrote " << hist_path.string() << "\n";

        std::vector<std::vector<std::string>> rate_rows;
        for (const EmpiricalRatePoint& p : empirical_rate(blocks)) {
            rate_rows.push_back({io::format_g17(p.eta_center), std::to_string(p.count),
                                 io::format_g17(p.rate), io::format_g17(p.std_error)});
        }
        const auto rate_path = config.out_dir / ("empirical_rate_" + name + ".csv");
        io::write_csv(rate_path, head, "eta,count,rate,std_error", rate_rows);
        std::cout << "wrote " << rate_path.string() << "\n";

        std::vector<std::vector<std::string>> block_rows;
        block_rows.reserve(blocks.eta_values.size());
        for (const double eta : blocks.eta_values) {
            block_rows.push_back({io::format_g17(eta)});
        }
        const auto blocks_path = config.out_dir / ("blocks_" + name + ".csv");
        io::write_csv(blocks_path, head, "eta", block_rows);
        std::cout << "wrote " << blocks_path.string() << "\n";

        if (config.verify) {
            // sampled moments against the exact per-cycle moments
            Xoshiro256StarStar rng(config.seed ^ 0x5eedULL);
            const std::size_t n = 200000;
            double sq = 0.0, sw = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const CycleSample s = sampler->sample(rng);
                sq += s.q2;
                sw += s.work();
            }
            const double sigma_q = std::sqrt(reference.var_q2 / n);
            const double sigma_w = std::sqrt(reference.var_w / n);
            if (std::abs(sq / n - reference.mean_q2) > 6.0 * sigma_q + 1e-12 ||
                std::abs(sw / n - reference.mean_w) > 6.0 * sigma_w + 1e-12) {
                std::cerr << "verification failed: sampled moments off for engine " << name << "\n";
                return 4;
            }
        }
    }
    io::write_text(config.out_dir / "plot_sample.py", kSamplePlot);
    if (config.verify) std::cout << "verified sampler moments\n";
    return 0;
}

}  // namespace qotto::cli
