#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "narx/commands.hpp"
#include "narx/errors.hpp"

namespace {

constexpr int kUsageExit = 2;

struct SubcommandSpec {
    const char* name;
    narx::Command command;
    const char* help;
};

constexpr SubcommandSpec kSubcommands[] = {
    {"train", narx::Command::Train, "Train one model per seed and score every split"},
    {"evaluate", narx::Command::Evaluate, "Score a saved model snapshot"},
    {"grid-search", narx::Command::GridSearch, "Sweep T and m = p, select by validation RMSE"},
    {"ablation", narx::Command::Ablation, "Train every listed variant on the same splits and seeds"},
    {"robustness", narx::Command::Robustness, "Compare clean inputs against permuted-copy inputs"},
    {"dump-attention", narx::Command::DumpAttention, "Export attention weights and predictions as CSV"},
    {"grad-check", narx::Command::GradCheck, "Finite-difference check of every variant's gradients"},
    {"synth-data", narx::Command::SynthData, "Write a synthetic driving/target CSV"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attention-based recurrent models for one-step time-series prediction"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::map<std::string, std::string> overrides;
    app.add_option("--config", config_path, "Flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", overrides["output_dir"], "Output directory (same as --output_dir)");
    for (const std::string& key : narx::config_keys()) {
        app.add_option("--" + key, overrides[key], "Config key '" + key + "'");
    }

    narx::Command chosen = narx::Command::Train;
    for (const auto& spec : kSubcommands) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->fallthrough();
        sub->callback([&chosen, c = spec.command] { chosen = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageExit;
    }

    narx::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg.apply_file(config_path);
        if (app.count("--out") > 0) cfg.set("output_dir", overrides["output_dir"]);
        for (const std::string& key : narx::config_keys()) {
            if (app.count("--" + key) > 0) cfg.set(key, overrides[key]);
        }
    } catch (const narx::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageExit;
    }

    try {
        return narx::run_command(chosen, cfg, std::cout);
    } catch (const narx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageExit;
    } catch (const narx::ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return kUsageExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
