// cbf — experiment runner for the periodic damped Navier-Stokes laboratory.
//
// Subcommands map onto the scenario drivers; every run writes a manifest,
// CSV diagnostics and a JSON summary into its output directory.
// Exit codes: 0 ok, 2 config error, 3 blow-up, 4 failed runtime check.

#include <CLI11.hpp>

#include "cbf/cbf.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    long long seed = -1;
    bool force = false;
    bool unsafe = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
    cmd->add_option("--config", fl.config_path, "configuration file ([section] key = value lines)");
    cmd->add_option("--out", fl.out, "output directory (overrides the config)");
    cmd->add_option("--seed", fl.seed, "seed override");
    cmd->add_flag("--force", fl.force, "overwrite an existing output directory");
    cmd->add_flag("--unsafe-regime", fl.unsafe, "allow d=3 with r<3 (well-posedness open)");
}

int dispatch(cbf::Scenario sc, const CommonFlags& fl) {
    cbf::ExperimentConfig cfg;
    if (!fl.config_path.empty()) cfg = cbf::load_config(fl.config_path);
    if (cfg.scenario && *cfg.scenario != sc)
        throw cbf::ConfigError(std::string("config names scenario '") +
                               cbf::scenario_name(*cfg.scenario) + "' but the subcommand is '" +
                               cbf::scenario_name(sc) + "'");
    cfg.scenario = sc;
    if (!fl.out.empty()) cfg.out_dir = fl.out;
    if (fl.seed >= 0) cfg.seed = static_cast<std::uint64_t>(fl.seed);
    if (fl.force) cfg.force_overwrite = true;
    if (fl.unsafe) cfg.unsafe_regime = true;
    return cbf::run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral laboratory for the convective Brinkman-Forchheimer equations"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        cbf::Scenario scenario;
    };
    const Sub subs[] = {
        {"simulate", "forward solve with energy-equality diagnostics", cbf::Scenario::forward},
        {"buniq", "two-solution backward-uniqueness experiment", cbf::Scenario::backward_uniqueness},
        {"duality", "tangent/adjoint duality audit", cbf::Scenario::duality_check},
        {"stochastic", "pathwise random runs with the energy-bound audit", cbf::Scenario::stochastic},
        {"lagrangian", "particle advection and separation monitoring", cbf::Scenario::lagrangian},
        {"continuity", "trajectory continuity in the Eulerian data", cbf::Scenario::continuity},
        {"attractor", "attractor sampling and deviation scales", cbf::Scenario::attractor},
        {"verify-operators", "operator identity suite (pass/fail table)",
         cbf::Scenario::verify_operators},
    };

    std::map<std::string, std::pair<cbf::Scenario, CommonFlags>> plans;
    for (const auto& s : subs) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        auto& slot = plans[s.name];
        slot.first = s.scenario;
        add_common(cmd, slot.second);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [name, plan] : plans)
            if (app.get_subcommand(name)->parsed()) return dispatch(plan.first, plan.second);
        std::fprintf(stderr, "no subcommand selected\n");
        return cbf::exit_config;
    } catch (const cbf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return cbf::exit_config;
    } catch (const cbf::RegimeError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return cbf::exit_config;
    } catch (const cbf::BlowupError& e) {
        std::fprintf(stderr, "blow-up: %s (step %ld)\n", e.what(), e.step);
        return cbf::exit_blowup;
    } catch (const cbf::AssertionError& e) {
        std::fprintf(stderr, "runtime check failed: %s\n", e.what());
        return cbf::exit_assertion;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cbf::exit_assertion;
    }
}
