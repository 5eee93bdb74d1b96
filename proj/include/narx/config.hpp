#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "narx/data.hpp"
#include "narx/experiments.hpp"
#include "narx/model.hpp"
#include "narx/train.hpp"

namespace narx {

enum class Command { Train, Evaluate, GridSearch, Ablation, Robustness, DumpAttention, GradCheck,
                     SynthData };

std::string_view command_name(Command c) noexcept;

/// Every knob of a CLI run. Populated from a flat `key = value` file and
/// then from command-line overrides; see config_keys() for the key list.
struct RunConfig {
    // dataset
    std::filesystem::path dataset;
    std::string target_column = "target";
    Normalization normalization = Normalization::Standardize;
    SplitSpec splits;  // all zero: 70/15/15 of the series

    // model
    ModelVariant variant = ModelVariant::DaRnn;
    std::size_t T = 10;
    std::size_t m = 64;
    std::size_t p = 64;

    // optimization (TrainConfig::seed is taken from `seeds`)
    TrainConfig train;
    std::vector<std::uint64_t> seeds{0};

    // driver
    std::filesystem::path output_dir = "out";
    std::size_t jobs = 1;
    std::vector<std::size_t> grid_T{3, 5, 10, 15, 25};
    std::vector<std::size_t> grid_m{16, 32, 64, 128, 256};
    std::vector<ModelVariant> variants{std::begin(kAllVariants), std::end(kAllVariants)};
    std::uint64_t noise_seed = 1;

    // dump-attention
    std::filesystem::path model;
    std::string split = "test";
    std::size_t window_begin = 0;
    std::size_t window_end = 0;  // exclusive; 0 means window_begin + 1

    // synth-data / grad-check
    std::size_t n = 10;
    std::size_t L = 2000;
    std::vector<std::size_t> relevant{1, 2};
    double noise_std = 0.1;
    std::uint64_t seed = 0;
    std::string synth_file = "synthetic.csv";
    double tol = 1e-4;
    double step = 1e-5;

    std::set<std::string> explicitly_set;

    /// Sets one key; unknown keys and unparsable values raise ConfigError.
    void set(const std::string& key, const std::string& value);
    /// Applies a whole `key = value` file (blank lines and `#` comments allowed).
    void apply_file(const std::filesystem::path& path);
    /// Checks everything `command` will need before any work starts.
    void validate_for(Command command) const;

    Hyperparams hyperparams(std::size_t n_series) const;
    TrainConfig train_config(std::uint64_t seed_value) const;
    /// T, n and m = p for grad-check; keys not set explicitly default to 4, 3, 4.
    Hyperparams grad_check_dims() const;
};

/// All recognized configuration keys.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines into pairs without interpreting them.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

}  // namespace narx
