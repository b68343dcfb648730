// qotto: work-heat statistics and efficiency large-deviation functions of
// two-level, harmonic and scale-invariant Otto engines.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qotto/cli/commands.hpp"
#include "qotto/cli/config.hpp"
#include "qotto/engines.hpp"

namespace {

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> tolerance;
    std::optional<std::string> engines;
    std::optional<std::string> regime;
    bool verify{false};

    std::optional<double> qstar_min, qstar_max;
    std::optional<std::size_t> qstar_points;
    std::optional<double> eta_min, eta_max;
    std::optional<std::size_t> eta_points;
    std::optional<double> g1_min, g1_max, g2_min, g2_max;
    std::optional<std::size_t> g1_points, g2_points;
    std::optional<std::size_t> cycles, blocks, bins;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "configuration file (key = value with sections)");
    cmd->add_option("--out-dir", o.out_dir, "output directory (default: QOTTO_OUT_DIR or ./out)");
    cmd->add_option("--seed", o.seed, "RNG seed recorded in all outputs");
    cmd->add_option("--threads", o.threads, "worker threads for grids and blocks");
    cmd->add_option("--tolerance", o.tolerance, "truncation tail tolerance");
    cmd->add_option("--engine", o.engines, "comma list: two_level,harmonic,scale_invariant");
    cmd->add_option("--regime", o.regime, "exact | linear | adiabatic");
    cmd->add_flag("--verify", o.verify, "cross-check against the enumeration oracle; exit 4 on breach");
}

qotto::cli::RunConfig resolve(const Overrides& o) {
    qotto::cli::RunConfig config;
    if (const char* env = std::getenv("QOTTO_OUT_DIR")) config.out_dir = env;
    if (o.config_path) config = qotto::cli::parse_config_file(*o.config_path, config);
    if (o.out_dir) config.out_dir = *o.out_dir;
    if (o.seed) config.seed = *o.seed;
    if (o.threads) config.threads = *o.threads;
    if (o.tolerance) config.tolerance = *o.tolerance;
    if (o.regime) config.regime = qotto::cli::parse_regime(*o.regime);
    if (o.engines) {
        config.engines.clear();
        std::string item;
        std::istringstream is(*o.engines);
        while (std::getline(is, item, ',')) {
            if (!item.empty()) config.engines.push_back(item);
        }
    }
    if (o.verify) config.verify = true;
    if (o.qstar_min) config.qstar_min = *o.qstar_min;
    if (o.qstar_max) config.qstar_max = *o.qstar_max;
    if (o.qstar_points) config.qstar_points = *o.qstar_points;
    if (o.eta_min) config.eta_min = *o.eta_min;
    if (o.eta_max) config.eta_max = *o.eta_max;
    if (o.eta_points) config.eta_points = *o.eta_points;
    if (o.g1_min) config.gamma1_min = *o.g1_min;
    if (o.g1_max) config.gamma1_max = *o.g1_max;
    if (o.g2_min) config.gamma2_min = *o.g2_min;
    if (o.g2_max) config.gamma2_max = *o.g2_max;
    if (o.g1_points) config.gamma1_points = *o.g1_points;
    if (o.g2_points) config.gamma2_points = *o.g2_points;
    if (o.cycles) config.cycles_per_block = *o.cycles;
    if (o.blocks) config.blocks = *o.blocks;
    if (o.bins) config.bins = *o.bins;
    config.finalize();
    return config;
}

int run(int (*command)(const qotto::cli::RunConfig&), const Overrides& o) {
    try {
        return command(resolve(o));
    } catch (const qotto::cli::config_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const qotto::truncation_error& e) {
        std::cerr << "numerical error: " << e.what() << " (achieved tail " << e.achieved_tail()
                  << ", need about " << e.required_levels() << " levels)\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"work-heat statistics and efficiency large deviations of quantum Otto engines"};
    app.require_subcommand(1);

    Overrides o;

    CLI::App* pearson = app.add_subcommand("pearson", "Pearson coefficient vs adiabaticity");
    add_common_flags(pearson, o);
    pearson->add_option("--qstar-min", o.qstar_min);
    pearson->add_option("--qstar-max", o.qstar_max);
    pearson->add_option("--qstar-points", o.qstar_points);

    CLI::App* ldf = app.add_subcommand("ldf", "efficiency large-deviation curves");
    add_common_flags(ldf, o);
    ldf->add_option("--eta-min", o.eta_min);
    ldf->add_option("--eta-max", o.eta_max);
    ldf->add_option("--eta-points", o.eta_points);

    CLI::App* contour = app.add_subcommand("contour", "CGF contour grids");
    add_common_flags(contour, o);
    contour->add_option("--gamma1-min", o.g1_min);
    contour->add_option("--gamma1-max", o.g1_max);
    contour->add_option("--gamma1-points", o.g1_points);
    contour->add_option("--gamma2-min", o.g2_min);
    contour->add_option("--gamma2-max", o.g2_max);
    contour->add_option("--gamma2-points", o.g2_points);

    CLI::App* sample = app.add_subcommand("sample", "Monte Carlo histograms and empirical rates");
    add_common_flags(sample, o);
    sample->add_option("-s,--cycles", o.cycles, "cycles per block");
    sample->add_option("--blocks", o.blocks);
    sample->add_option("--bins", o.bins);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (pearson->parsed()) return run(qotto::cli::cmd_pearson, o);
    if (ldf->parsed()) return run(qotto::cli::cmd_ldf, o);
    if (contour->parsed()) return run(qotto::cli::cmd_contour, o);
    if (sample->parsed()) return run(qotto::cli::cmd_sample, o);
    return 2;
}
