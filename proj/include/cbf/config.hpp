#pragma once
// Experiment configuration: line-oriented "key = value" text with [section]
// headers. Parsing is strict — unknown sections or keys are rejected with
// their name and position, and values must consume the whole token.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cbf/error.hpp"
#include "cbf/params.hpp"
#include "cbf/time_grid.hpp"

namespace cbf {

enum class Scenario {
    forward,
    backward_uniqueness,
    duality_check,
    stochastic,
    lagrangian,
    continuity,
    attractor,
    verify_operators,
};

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::forward: return "forward";
        case Scenario::backward_uniqueness: return "backward-uniqueness";
        case Scenario::duality_check: return "duality-check";
        case Scenario::stochastic: return "stochastic";
        case Scenario::lagrangian: return "lagrangian";
        case Scenario::continuity: return "continuity";
        case Scenario::attractor: return "attractor";
        case Scenario::verify_operators: return "verify-operators";
    }
    return "?";
}

inline std::optional<Scenario> scenario_from_name(const std::string& s) {
    for (Scenario sc : {Scenario::forward, Scenario::backward_uniqueness, Scenario::duality_check,
                        Scenario::stochastic, Scenario::lagrangian, Scenario::continuity,
                        Scenario::attractor, Scenario::verify_operators})
        if (s == scenario_name(sc)) return sc;
    return std::nullopt;
}

/// initial-condition construction used by the runner
struct InitialSpec {
    std::string kind = "taylor_green";  // taylor_green | random | shear | zero
    double amplitude = 1.0;
    int mode = 1;            // harmonic for taylor_green / shear
    std::uint64_t seed = 1;  // for random
    double decay = 0.7;
    int max_wavenumber = 0;  // 0 = full dealiased band
};

struct ForcingConfig {
    std::string kind = "zero";  // zero | steady_random | steady_taylor_green
    double amplitude = 0.1;
    std::uint64_t seed = 2;
    double decay = 0.8;
    int max_wavenumber = 3;
};

/// everything a run needs; defaults are the documented default preset
struct ExperimentConfig {
    std::optional<Scenario> scenario;  // usually supplied by the subcommand
    // grid
    int d = 2;
    double L = 1.0;
    int N = 64;
    // physics
    PhysParams params{};
    // time
    double t0 = 0.0;
    double T = 2.0;
    double dt = 1e-3;
    // data
    InitialSpec initial{};
    ForcingConfig forcing{};
    // run control
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    long snapshot_stride = 1;
    long eval_stride = 5;
    double M0 = 0.0;  // 0 = auto policy
    bool unsafe_regime = false;
    bool force_overwrite = false;
    // scenario knobs
    long buniq_pairs = 10;
    double buniq_perturbation = 1e-3;
    long duality_pairs = 20;
    double duality_tolerance = 1e-6;
    std::string adjoint_mode = "time_reversed";  // or discrete_transpose
    long stochastic_paths = 10;
    bool stochastic_pair_mode = false;
    double stochastic_perturbation = 1e-3;
    long particles = 8;
    double lagrangian_s = 0.0;  // 0 = default d/2 + 3/2
    std::vector<std::size_t> truncations{4, 8, 16, 32};
    long attractor_initial = 8;
    double attractor_burn_in = 0.0;  // 0 = 10/alpha
    double attractor_window = 1.0;
    long attractor_samples_per_ic = 4;
    std::size_t attractor_n_max = 16;

    std::string raw_text;  // config file contents, embedded in the manifest

    TimeGrid time_grid() const { return TimeGrid(t0, T, dt); }
    Grid grid() const { return Grid(d, L, N); }

    void validate() const {
        params.validate();
        (void)grid();
        (void)time_grid();
        if (params.critical_warning(d))
            std::fprintf(stderr,
                         "warning: d=r=3 with 2 beta mu = %g < 1; outside the critical-regime condition\n",
                         2.0 * params.beta * params.mu);
        if (!params.regime_admissible(d) && !unsafe_regime)
            throw ConfigError("regime d=3, r<3 requires --unsafe-regime");
    }
};

namespace detail {

struct ConfigToken {
    std::string section, key, value;
    int line = 0;
    int col = 0;
};

inline std::vector<ConfigToken> tokenize_config(const std::string& text) {
    std::vector<ConfigToken> out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        auto ltrim = s.find_first_not_of(" \t\r");
        if (ltrim == std::string::npos) continue;
        auto rtrim = s.find_last_not_of(" \t\r");
        s = s.substr(ltrim, rtrim - ltrim + 1);
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            section = s.substr(1, s.size() - 2);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string t) {
            const auto a = t.find_first_not_of(" \t");
            const auto b = t.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
        };
        ConfigToken tok;
        tok.section = section;
        tok.key = trim(s.substr(0, eq));
        tok.value = trim(s.substr(eq + 1));
        tok.line = lineno;
        tok.col = static_cast<int>(ltrim) + 1;
        if (tok.key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        out.push_back(tok);
    }
    return out;
}

inline double parse_double(const ConfigToken& t) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t.value, &pos);
    } catch (...) {
        throw ConfigError("config line " + std::to_string(t.line) + ": bad number for '" + t.key + "'");
    }
    if (pos != t.value.size())
        throw ConfigError("config line " + std::to_string(t.line) + ": trailing characters in '" +
                          t.key + "'");
    return v;
}

inline long parse_long(const ConfigToken& t) {
    const double v = parse_double(t);
    const long l = std::lround(v);
    if (v != static_cast<double>(l))
        throw ConfigError("config line " + std::to_string(t.line) + ": '" + t.key +
                          "' must be an integer");
    return l;
}

inline bool parse_bool(const ConfigToken& t) {
    if (t.value == "true" || t.value == "1") return true;
    if (t.value == "false" || t.value == "0") return false;
    throw ConfigError("config line " + std::to_string(t.line) + ": '" + t.key +
                      "' must be true or false");
}

inline std::vector<std::size_t> parse_size_list(const ConfigToken& t) {
    std::vector<std::size_t> out;
    std::istringstream in(t.value);
    long v;
    while (in >> v) {
        if (v < 0) throw ConfigError("config line " + std::to_string(t.line) + ": negative entry");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (!in.eof())
        throw ConfigError("config line " + std::to_string(t.line) + ": bad list for '" + t.key + "'");
    if (out.empty())
        throw ConfigError("config line " + std::to_string(t.line) + ": empty list for '" + t.key + "'");
    return out;
}

}  // namespace detail

/// strict parse; unknown keys are rejected with their name and position
inline ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig c;
    c.raw_text = text;
    for (const auto& t : detail::tokenize_config(text)) {
        const std::string where = t.section + "." + t.key;
        auto unknown = [&]() {
            throw ConfigError("config line " + std::to_string(t.line) + " col " +
                              std::to_string(t.col) + ": unknown key '" + where + "'");
        };
        if (t.section == "grid") {
            if (t.key == "d") c.d = static_cast<int>(detail::parse_long(t));
            else if (t.key == "L") c.L = detail::parse_double(t);
            else if (t.key == "N") c.N = static_cast<int>(detail::parse_long(t));
            else unknown();
        } else if (t.section == "params") {
            if (t.key == "mu") c.params.mu = detail::parse_double(t);
            else if (t.key == "alpha") c.params.alpha = detail::parse_double(t);
            else if (t.key == "beta") c.params.beta = detail::parse_double(t);
            else if (t.key == "r") c.params.r = detail::parse_double(t);
            else if (t.key == "sigma") c.params.sigma = detail::parse_double(t);
            else unknown();
        } else if (t.section == "time") {
            if (t.key == "t0") c.t0 = detail::parse_double(t);
            else if (t.key == "T") c.T = detail::parse_double(t);
            else if (t.key == "dt") c.dt = detail::parse_double(t);
            else unknown();
        } else if (t.section == "initial") {
            if (t.key == "kind") c.initial.kind = t.value;
            else if (t.key == "amplitude") c.initial.amplitude = detail::parse_double(t);
            else if (t.key == "mode") c.initial.mode = static_cast<int>(detail::parse_long(t));
            else if (t.key == "seed") c.initial.seed = static_cast<std::uint64_t>(detail::parse_long(t));
            else if (t.key == "decay") c.initial.decay = detail::parse_double(t);
            else if (t.key == "max_wavenumber")
                c.initial.max_wavenumber = static_cast<int>(detail::parse_long(t));
            else unknown();
        } else if (t.section == "forcing") {
            if (t.key == "kind") c.forcing.kind = t.value;
            else if (t.key == "amplitude") c.forcing.amplitude = detail::parse_double(t);
            else if (t.key == "seed") c.forcing.seed = static_cast<std::uint64_t>(detail::parse_long(t));
            else if (t.key == "decay") c.forcing.decay = detail::parse_double(t);
            else if (t.key == "max_wavenumber")
                c.forcing.max_wavenumber = static_cast<int>(detail::parse_long(t));
            else unknown();
        } else if (t.section == "run") {
            if (t.key == "scenario") {
                auto sc = scenario_from_name(t.value);
                if (!sc)
                    throw ConfigError("config line " + std::to_string(t.line) +
                                      ": unknown scenario '" + t.value + "'");
                c.scenario = *sc;
            } else if (t.key == "seed") c.seed = static_cast<std::uint64_t>(detail::parse_long(t));
            else if (t.key == "out") c.out_dir = t.value;
            else if (t.key == "snapshot_stride") c.snapshot_stride = detail::parse_long(t);
            else if (t.key == "eval_stride") c.eval_stride = detail::parse_long(t);
            else if (t.key == "M0") c.M0 = t.value == "auto" ? 0.0 : detail::parse_double(t);
            else if (t.key == "unsafe_regime") c.unsafe_regime = detail::parse_bool(t);
            else if (t.key == "force") c.force_overwrite = detail::parse_bool(t);
            else unknown();
        } else if (t.section == "buniq") {
            if (t.key == "pairs") c.buniq_pairs = detail::parse_long(t);
            else if (t.key == "perturbation") c.buniq_perturbation = detail::parse_double(t);
            else unknown();
        } else if (t.section == "duality") {
            if (t.key == "pairs") c.duality_pairs = detail::parse_long(t);
            else if (t.key == "tolerance") c.duality_tolerance = detail::parse_double(t);
            else if (t.key == "adjoint_mode") c.adjoint_mode = t.value;
            else unknown();
        } else if (t.section == "stochastic") {
            if (t.key == "paths") c.stochastic_paths = detail::parse_long(t);
            else if (t.key == "pair_mode") c.stochastic_pair_mode = detail::parse_bool(t);
            else if (t.key == "perturbation") c.stochastic_perturbation = detail::parse_double(t);
            else unknown();
        } else if (t.section == "lagrangian") {
            if (t.key == "particles") c.particles = detail::parse_long(t);
            else if (t.key == "s_exponent") c.lagrangian_s = detail::parse_double(t);
            else unknown();
        } else if (t.section == "continuity") {
            if (t.key == "truncations") c.truncations = detail::parse_size_list(t);
            else unknown();
        } else if (t.section == "attractor") {
            if (t.key == "n_initial") c.attractor_initial = detail::parse_long(t);
            else if (t.key == "burn_in") c.attractor_burn_in = detail::parse_double(t);
            else if (t.key == "sample_window") c.attractor_window = detail::parse_double(t);
            else if (t.key == "samples_per_ic") c.attractor_samples_per_ic = detail::parse_long(t);
            else if (t.key == "n_max")
                c.attractor_n_max = static_cast<std::size_t>(detail::parse_long(t));
            else unknown();
        } else {
            throw ConfigError("config line " + std::to_string(t.line) + ": unknown section '" +
                              t.section + "'");
        }
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace cbf
