// Command-line front end for the pipeline stages and experiments.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "minav/config.hpp"
#include "minav/error.hpp"
#include "minav/pipeline.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "run";
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Run config file (section.key = value)")->required();
    cmd->add_option("--seed", c.seed, "Master seed; overrides run.seed");
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_flag("--quiet", c.quiet, "No progress output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minav: offline goal-conditioned navigation pipeline in a simulated maze"};
    app.require_subcommand(1);
    Common common;
    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"collect", "Roll exploration noise through the maze and write dataset.bin"},
        {"process", "Build the SSD-filtered goal set and coverage metrics"},
        {"train", "Offline TD3+BC training with periodic checkpoints"},
        {"select", "Score checkpoints with FQE and pick the best"},
        {"evaluate", "Closed-loop evaluation of the selected policy"},
        {"pipeline", "All five stages in order"},
        {"ablate-noise", "Pipeline per noise kind and seed"},
        {"scaling", "Pipeline per collection budget and seed"},
        {"entropy", "Coverage entropy per noise kind and seed"},
    };
    for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (!common.quiet) minav::set_log_stream(&std::cerr);

    minav::RunConfig cfg;
    try {
        cfg = minav::load_config(common.config);
        if (common.seed) {
            cfg.seed = *common.seed;
            cfg.finalize();
        }
    } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return minav::stage_exit_code(minav::Stage::config);
    }

    const std::filesystem::path out = common.out;
    try {
        if (cmd == "collect") {
            minav::run_collect(cfg, out);
        } else if (cmd == "process") {
            minav::run_process(cfg, out);
        } else if (cmd == "train") {
            minav::run_train(cfg, out);
        } else if (cmd == "select") {
            minav::run_select(cfg, out);
        } else if (cmd == "evaluate") {
            minav::run_evaluate(cfg, out);
        } else if (cmd == "pipeline") {
            const auto s = minav::run_pipeline(cfg, out);
            std::cout << "selected_step=" << s.selected_step << " sr=" << s.sr << " stl=" << s.stl << "\n";
        } else {
            try {
                if (cmd == "ablate-noise") minav::run_ablate_noise(cfg, out);
                if (cmd == "scaling") minav::run_scaling(cfg, out);
                if (cmd == "entropy") minav::run_entropy(cfg, out);
            } catch (const minav::StageFailure&) {
                throw;
            } catch (const std::exception& e) {
                throw minav::StageFailure(minav::Stage::experiment, e.what());
            }
        }
    } catch (const minav::StageFailure& e) {
        std::cerr << e.what() << "\n";
        return minav::stage_exit_code(e.stage());
    } catch (const std::exception& e) {
        std::cerr << cmd << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
