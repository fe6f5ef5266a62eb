// Command-line driver: every subcommand reads a flat key-value config file,
// resolves defaults into a manifest, and writes its artifacts into a
// content-addressed run directory.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "arratia/run.hpp"

namespace {

int dispatch(const std::string& config_path, arratia::RunMode mode,
             std::optional<std::int64_t> seed_override, bool mode_from_config) {
    arratia::RunConfig cfg;
    try {
        cfg = arratia::load_config(config_path);
        if (!mode_from_config) cfg.mode = mode;
        if (mode_from_config &&
            (cfg.mode != arratia::RunMode::Coalescing && cfg.mode != arratia::RunMode::Smooth)) {
            std::cerr << config_path << ":1: simulate requires mode coalescing or smooth\n";
            return 2;
        }
    } catch (const arratia::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    if (seed_override) cfg.seed = *seed_override;

    const arratia::RunResult result = arratia::run(cfg);
    for (const auto& msg : result.messages) std::cout << msg << '\n';
    if (result.exit_code == 0) {
        std::cout << "ok: " << result.run_dir << '\n';
    } else {
        std::cerr << "failed checks, see reports under " << result.run_dir << '\n';
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coalescing and mollified interacting-particle flows driven by a shared "
                 "Brownian sheet"};
    app.require_subcommand(1);

    struct SubSpec {
        const char* name;
        const char* help;
        arratia::RunMode mode;
        bool mode_from_config;
    };
    const SubSpec subs[] = {
        {"simulate", "Simulate one flow (mode = coalescing | smooth from the config)",
         arratia::RunMode::Coalescing, true},
        {"compare", "Same-sheet study across (sigma, epsilon) configurations",
         arratia::RunMode::Compare, false},
        {"verify", "Statistical battery: sheet laws, martingale and mean-QV checks",
         arratia::RunMode::Verify, false},
        {"ito", "Measure-valued Ito-formula residual checks", arratia::RunMode::Ito, false},
        {"sheet-check", "Sheet distribution battery on the configured grid",
         arratia::RunMode::SheetCheck, false},
        {"mass-stats", "Inverse-mass moment scan over time horizons",
         arratia::RunMode::MassStats, false},
    };

    struct SubState {
        std::string config_path;
        std::optional<std::int64_t> seed;
    };
    std::vector<std::shared_ptr<SubState>> states;

    for (const auto& spec : subs) {
        auto state = std::make_shared<SubState>();
        states.push_back(state);
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option("--config", state->config_path, "Run configuration file")->required();
        sub->add_option("--seed", state->seed, "Override the config seed");
        sub->callback([state, spec]() {
            std::exit(dispatch(state->config_path, spec.mode, state->seed,
                               spec.mode_from_config));
        });
    }

    CLI11_PARSE(app, argc, argv);
    return 0;
}
