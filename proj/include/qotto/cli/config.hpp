// config.hpp: declarative run configuration. Flat key = value text with one
// section per engine; command-line flags override file values.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qotto::cli {

class config_error : public std::runtime_error {
public:
    config_error(const std::string& message, int line = 0, const std::string& field = {})
        : std::runtime_error(format(message, line, field)), line_(line), field_(field) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& message, int line, const std::string& field);
    int line_;
    std::string field_;
};

enum class Regime { exact, linear, adiabatic };

const char* to_string(Regime regime);
Regime parse_regime(const std::string& text);

struct RunConfig {
    // [baths]
    double beta_c{3.0};
    double beta_h{0.1};

    // [two_level]
    double nu0{1.0};
    double nu_tau{2.0};
    double u{0.95};
    std::optional<double> lambda1, lambda2, tau;  // alternative u specification

    // [harmonic]
    double omega0{1.0};
    double omega_tau{2.0};
    double q_star{1.2};
    std::size_t n_levels{256};  // 0: adaptive from the tail tolerance

    // [scale_invariant]
    std::vector<double> spectrum;
    double eps_tau_sq{0.5};

    // [grids]
    double eta_min{-0.5};
    double eta_max{1.5};
    std::size_t eta_points{201};
    double gamma1_min{-3.0}, gamma1_max{3.0};
    double gamma2_min{-3.0}, gamma2_max{3.0};
    std::size_t gamma1_points{61}, gamma2_points{61};
    double qstar_min{1.0}, qstar_max{2.0};
    std::size_t qstar_points{41};

    // [run]
    std::vector<std::string> engines{"two_level", "harmonic"};
    Regime regime{Regime::exact};
    std::uint64_t seed{20200622};
    int threads{1};
    double tolerance{1e-10};  // truncation tail tolerance
    std::filesystem::path out_dir{"out"};
    std::size_t cycles_per_block{20};
    std::size_t blocks{100000};
    std::size_t bins{101};
    bool verify{false};

    // Resolve the two-level u from the drive parameters when given, validate
    // everything, and make sure the output directory exists.
    void finalize();

    // Deterministic "section.key = value" provenance lines.
    std::vector<std::string> provenance(const std::string& version) const;
};

RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base = {});

}  // namespace qotto::cli
