#include "qotto/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qotto/engines.hpp"
#include "qotto/io.hpp"

namespace qotto::cli {

std::string config_error::format(const std::string& message, int line, const std::string& field) {
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " (line " << line << ")";
    if (!field.empty()) os << " [" << field << "]";
    os << ": " << message;
    return os.str();
}

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::exact: return "exact";
        case Regime::linear: return "linear";
        case Regime::adiabatic: return "adiabatic";
    }
    return "unknown";
}

Regime parse_regime(const std::string& text) {
    if (text == "exact") return Regime::exact;
    if (text == "linear") return Regime::linear;
    if (text == "adiabatic") return Regime::adiabatic;
    throw config_error("unknown regime '" + text + "' (exact|linear|adiabatic)", 0, "run.regime");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, int line, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error("expected a number, got '" + text + "'", line, field);
    }
}

std::uint64_t parse_u64(const std::string& text, int line, const std::string& field) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error("expected a nonnegative integer, got '" + text + "'", line, field);
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

void RunConfig::finalize() {
    if (lambda1 || lambda2 || tau) {
        if (!(lambda1 && lambda2 && tau)) {
            throw config_error("lambda1, lambda2 and tau must be given together", 0, "two_level");
        }
        u = tls_no_transition_prob(*lambda1, *lambda2, *tau);
    }
    // Constructor invariants double as validation.
    const BathPair baths(beta_c, beta_h);
    (void)baths;
    for (const std::string& engine : engines) {
        if (engine == "two_level") {
            (void)TwoLevelEngine(nu0, nu_tau, u);
        } else if (engine == "harmonic") {
            (void)HarmonicEngine(omega0, omega_tau, q_star);
        } else if (engine == "scale_invariant") {
            if (spectrum.empty()) {
                throw config_error("scale_invariant engine needs a spectrum", 0,
                                   "scale_invariant.spectrum");
            }
            (void)ScaleInvariantEngine(spectrum, eps_tau_sq);
        } else {
            throw config_error("unknown engine '" + engine + "'", 0, "run.engines");
        }
    }
    if (engines.empty()) throw config_error("no engines selected", 0, "run.engines");
    if (eta_points < 2 || !(eta_max > eta_min)) {
        throw config_error("eta grid must be increasing with at least 2 points", 0, "grids");
    }
    if (gamma1_points < 2 || gamma2_points < 2 || !(gamma1_max > gamma1_min) ||
        !(gamma2_max > gamma2_min)) {
        throw config_error("gamma window must have positive area and >= 2 points per axis", 0,
                           "grids");
    }
    if (qstar_points < 1 || !(qstar_max >= qstar_min)) {
        throw config_error("q_star sweep must be nondecreasing", 0, "grids");
    }
    if (threads < 1) throw config_error("threads must be >= 1", 0, "run.threads");
    if (!(tolerance > 0.0)) throw config_error("tolerance must be > 0", 0, "run.tolerance");
    if (bins < 1) throw config_error("bins must be >= 1", 0, "run.bins");
    if (cycles_per_block < 1) throw config_error("s must be >= 1", 0, "run.s");
    if (blocks < 1) throw config_error("blocks must be >= 1", 0, "run.blocks");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw config_error("output directory not writable: " + out_dir.string(), 0, "run.out_dir");
    }
}

std::vector<std::string> RunConfig::provenance(const std::string& version) const {
    std::vector<std::string> lines;
    lines.push_back("qotto " + version);
    auto add = [&lines](const std::string& key, const std::string& value) {
        lines.push_back(key + " = " + value);
    };
    add("baths.beta_c", io::format_g17(beta_c));
    add("baths.beta_h", io::format_g17(beta_h));
    add("two_level.nu0", io::format_g17(nu0));
    add("two_level.nu_tau", io::format_g17(nu_tau));
    add("two_level.u", io::format_g17(u));
    add("harmonic.omega0", io::format_g17(omega0));
    add("harmonic.omega_tau", io::format_g17(omega_tau));
    add("harmonic.q_star", io::format_g17(q_star));
    add("harmonic.n_levels", std::to_string(n_levels));
    if (!spectrum.empty()) {
        std::string list;
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            if (i) list += ", ";
            list += io::format_g17(spectrum[i]);
        }
        add("scale_invariant.spectrum", list);
        add("scale_invariant.eps_tau_sq", io::format_g17(eps_tau_sq));
    }
    add("grids.eta", io::format_g17(eta_min) + " .. " + io::format_g17(eta_max) + " x " +
                         std::to_string(eta_points));
    add("grids.gamma1", io::format_g17(gamma1_min) + " .. " + io::format_g17(gamma1_max) + " x " +
                            std::to_string(gamma1_points));
    add("grids.gamma2", io::format_g17(gamma2_min) + " .. " + io::format_g17(gamma2_max) + " x " +
                            std::to_string(gamma2_points));
    add("grids.qstar", io::format_g17(qstar_min) + " .. " + io::format_g17(qstar_max) + " x " +
                           std::to_string(qstar_points));
    std::string engine_list;
    for (std::size_t i = 0; i < engines.size(); ++i) {
        if (i) engine_list += ",";
        engine_list += engines[i];
    }
    add("run.engines", engine_list);
    add("run.regime", to_string(regime));
    add("run.seed", std::to_string(seed));
    add("run.threads", std::to_string(threads));
    add("run.tolerance", io::format_g17(tolerance));
    add("run.s", std::to_string(cycles_per_block));
    add("run.blocks", std::to_string(blocks));
    add("run.bins", std::to_string(bins));
    return lines;
}

RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream is(path);
    if (!is) {
        throw config_error("cannot open config file: " + path.string());
    }

    RunConfig& c = base;
    using Setter = std::function<void(const std::string&, int)>;
    const std::map<std::string, Setter> setters = {
        {"baths.beta_c", [&](const std::string& v, int ln) { c.beta_c = parse_double(v, ln, "baths.beta_c"); }},
        {"baths.beta_h", [&](const std::string& v, int ln) { c.beta_h = parse_double(v, ln, "baths.beta_h"); }},
        {"two_level.nu0", [&](const std::string& v, int ln) { c.nu0 = parse_double(v, ln, "two_level.nu0"); }},
        {"two_level.nu_tau", [&](const std::string& v, int ln) { c.nu_tau = parse_double(v, ln, "two_level.nu_tau"); }},
        {"two_level.u", [&](const std::string& v, int ln) { c.u = parse_double(v, ln, "two_level.u"); }},
        {"two_level.q_star", [&](const std::string& v, int ln) { c.u = (parse_double(v, ln, "two_level.q_star") + 1.0) / 2.0; }},
        {"two_level.lambda1", [&](const std::string& v, int ln) { c.lambda1 = parse_double(v, ln, "two_level.lambda1"); }},
        {"two_level.lambda2", [&](const std::string& v, int ln) { c.lambda2 = parse_double(v, ln, "two_level.lambda2"); }},
        {"two_level.tau", [&](const std::string& v, int ln) { c.tau = parse_double(v, ln, "two_level.tau"); }},
        {"harmonic.omega0", [&](const std::string& v, int ln) { c.omega0 = parse_double(v, ln, "harmonic.omega0"); }},
        {"harmonic.omega_tau", [&](const std::string& v, int ln) { c.omega_tau = parse_double(v, ln, "harmonic.omega_tau"); }},
        {"harmonic.q_star", [&](const std::string& v, int ln) { c.q_star = parse_double(v, ln, "harmonic.q_star"); }},
        {"harmonic.n_levels", [&](const std::string& v, int ln) { c.n_levels = parse_u64(v, ln, "harmonic.n_levels"); }},
        {"scale_invariant.spectrum",
         [&](const std::string& v, int ln) {
             c.spectrum.clear();
             for (const std::string& item : split_list(v)) {
                 c.spectrum.push_back(parse_double(item, ln, "scale_invariant.spectrum"));
             }
         }},
        {"scale_invariant.eps_tau_sq",
         [&](const std::string& v, int ln) { c.eps_tau_sq = parse_double(v, ln, "scale_invariant.eps_tau_sq"); }},
        {"grids.eta_min", [&](const std::string& v, int ln) { c.eta_min = parse_double(v, ln, "grids.eta_min"); }},
        {"grids.eta_max", [&](const std::string& v, int ln) { c.eta_max = parse_double(v, ln, "grids.eta_max"); }},
        {"grids.eta_points", [&](const std::string& v, int ln) { c.eta_points = parse_u64(v, ln, "grids.eta_points"); }},
        {"grids.gamma1_min", [&](const std::string& v, int ln) { c.gamma1_min = parse_double(v, ln, "grids.gamma1_min"); }},
        {"grids.gamma1_max", [&](const std::string& v, int ln) { c.gamma1_max = parse_double(v, ln, "grids.gamma1_max"); }},
        {"grids.gamma1_points", [&](const std::string& v, int ln) { c.gamma1_points = parse_u64(v, ln, "grids.gamma1_points"); }},
        {"grids.gamma2_min", [&](const std::string& v, int ln) { c.gamma2_min = parse_double(v, ln, "grids.gamma2_min"); }},
        {"grids.gamma2_max", [&](const std::string& v, int ln) { c.gamma2_max = parse_double(v, ln, "grids.gamma2_max"); }},
        {"grids.gamma2_points", [&](const std::string& v, int ln) { c.gamma2_points = parse_u64(v, ln, "grids.gamma2_points"); }},
        {"grids.qstar_min", [&](const std::string& v, int ln) { c.qstar_min = parse_double(v, ln, "grids.qstar_min"); }},
        {"grids.qstar_max", [&](const std::string& v, int ln) { c.qstar_max = parse_double(v, ln, "grids.qstar_max"); }},
        {"grids.qstar_points", [&](const std::string& v, int ln) { c.qstar_points = parse_u64(v, ln, "grids.qstar_points"); }},
        {"run.engines", [&](const std::string& v, int) { c.engines = split_list(v); }},
        {"run.regime", [&](const std::string& v, int) { c.regime = parse_regime(v); }},
        {"run.seed", [&](const std::string& v, int ln) { c.seed = parse_u64(v, ln, "run.seed"); }},
        {"run.threads", [&](const std::string& v, int ln) { c.threads = static_cast<int>(parse_u64(v, ln, "run.threads")); }},
        {"run.tolerance", [&](const std::string& v, int ln) { c.tolerance = parse_double(v, ln, "run.tolerance"); }},
        {"run.out_dir", [&](const std::string& v, int) { c.out_dir = v; }},
        {"run.s", [&](const std::string& v, int ln) { c.cycles_per_block = parse_u64(v, ln, "run.s"); }},
        {"run.blocks", [&](const std::string& v, int ln) { c.blocks = parse_u64(v, ln, "run.blocks"); }},
        {"run.bins", [&](const std::string& v, int ln) { c.bins = parse_u64(v, ln, "run.bins"); }},
    };

    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("expected 'key = value'", line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qualified = section.empty() ? key : section + "." + key;
        const auto it = setters.find(qualified);
        if (it == setters.end()) {
            throw config_error("unknown key '" + qualified + "'", line_no, qualified);
        }
        it->second(value, line_no);
    }
    return base;
}

}  // namespace qotto::cli
