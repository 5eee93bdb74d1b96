#include "narx/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "narx/errors.hpp"

namespace narx {

std::string_view command_name(Command c) noexcept {
    switch (c) {
        case Command::Train: return "train";
        case Command::Evaluate: return "evaluate";
        case Command::GridSearch: return "grid-search";
        case Command::Ablation: return "ablation";
        case Command::Robustness: return "robustness";
        case Command::DumpAttention: return "dump-attention";
        case Command::GradCheck: return "grad-check";
        case Command::SynthData: return "synth-data";
    }
    return "unknown";
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "dataset",      "target_column", "normalization", "train_len",   "valid_len",
        "test_len",     "variant",       "T",             "m",           "p",
        "batch_size",   "lr0",           "decay_factor",  "decay_every", "max_epochs",
        "shuffle",      "seeds",         "output_dir",    "jobs",        "grid_T",
        "grid_m",       "variants",      "noise_seed",    "model",       "split",
        "window_begin", "window_end",    "n",             "L",           "relevant",
        "noise_std",    "seed",          "synth_file",    "tol",         "step"};
    return keys;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError("config key '" + key + "': not finite");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, trim(item)));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "off" || text == "0" || text == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "dataset") dataset = value;
    else if (key == "target_column") target_column = value;
    else if (key == "normalization") {
        if (value == "standardize") normalization = Normalization::Standardize;
        else if (value == "none") normalization = Normalization::None;
        else throw ConfigError("normalization must be 'standardize' or 'none', got '" + value + "'");
    }
    else if (key == "train_len") splits.train_len = parse_number<std::size_t>(key, value);
    else if (key == "valid_len") splits.valid_len = parse_number<std::size_t>(key, value);
    else if (key == "test_len") splits.test_len = parse_number<std::size_t>(key, value);
    else if (key == "variant") variant = parse_variant(value);
    else if (key == "T") T = parse_number<std::size_t>(key, value);
    else if (key == "m") m = parse_number<std::size_t>(key, value);
    else if (key == "p") p = parse_number<std::size_t>(key, value);
    else if (key == "batch_size") train.batch_size = parse_number<std::size_t>(key, value);
    else if (key == "lr0") train.lr0 = parse_number<double>(key, value);
    else if (key == "decay_factor") train.decay_factor = parse_number<double>(key, value);
    else if (key == "decay_every") train.decay_every = parse_number<std::size_t>(key, value);
    else if (key == "max_epochs") train.max_epochs = parse_number<std::size_t>(key, value);
    else if (key == "shuffle") train.shuffle = parse_bool(key, value);
    else if (key == "seeds") seeds = parse_list<std::uint64_t>(key, value);
    else if (key == "output_dir") output_dir = value;
    else if (key == "jobs") jobs = parse_number<std::size_t>(key, value);
    else if (key == "grid_T") grid_T = parse_list<std::size_t>(key, value);
    else if (key == "grid_m") grid_m = parse_list<std::size_t>(key, value);
    else if (key == "variants") {
        variants.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) variants.push_back(parse_variant(trim(item)));
        if (variants.empty()) throw ConfigError("variants: empty list");
    }
    else if (key == "noise_seed") noise_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "model") model = value;
    else if (key == "split") {
        if (value != "train" && value != "valid" && value != "test") {
            throw ConfigError("split must be train, valid or test, got '" + value + "'");
        }
        split = value;
    }
    else if (key == "window_begin") window_begin = parse_number<std::size_t>(key, value);
    else if (key == "window_end") window_end = parse_number<std::size_t>(key, value);
    else if (key == "n") n = parse_number<std::size_t>(key, value);
    else if (key == "L") L = parse_number<std::size_t>(key, value);
    else if (key == "relevant") relevant = parse_list<std::size_t>(key, value);
    else if (key == "noise_std") noise_std = parse_number<double>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "synth_file") synth_file = value;
    else if (key == "tol") tol = parse_number<double>(key, value);
    else if (key == "step") step = parse_number<double>(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
    explicitly_set.insert(key);
}

void RunConfig::apply_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    for (const auto& [key, value] : parse_config_text(buffer.str())) set(key, value);
}

void RunConfig::validate_for(Command command) const {
    const bool needs_data = command != Command::GradCheck && command != Command::SynthData;
    if (needs_data) {
        if (dataset.empty()) throw ConfigError("'dataset' is required");
        if (!std::filesystem::exists(dataset)) {
            throw ConfigError("dataset not found: " + dataset.string());
        }
        if (target_column.empty()) throw ConfigError("'target_column' is empty");
        const std::size_t given = (splits.train_len > 0) + (splits.valid_len > 0) +
                                  (splits.test_len > 0);
        if (given != 0 && given != 3) {
            throw ConfigError("set all of train_len, valid_len, test_len or none of them");
        }
        if (T < 2) throw ConfigError("T must be >= 2");
        if (m < 1 || p < 1) throw ConfigError("m and p must be >= 1");
        try {
            train.validate();
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
        if (seeds.empty()) throw ConfigError("'seeds' is empty");
    }
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    switch (command) {
        case Command::GridSearch:
            if (grid_T.empty() || grid_m.empty()) throw ConfigError("grid_T and grid_m must be nonempty");
            for (std::size_t t : grid_T) {
                if (t < 2) throw ConfigError("grid_T entries must be >= 2");
            }
            for (std::size_t h : grid_m) {
                if (h < 1) throw ConfigError("grid_m entries must be >= 1");
            }
            break;
        case Command::Robustness:
            if (variant != ModelVariant::DaRnn && variant != ModelVariant::InputAttnRnn) {
                throw ConfigError("robustness needs a variant with input attention");
            }
            break;
        case Command::Evaluate:
        case Command::DumpAttention:
            if (model.empty()) throw ConfigError("'model' snapshot path is required");
            if (!std::filesystem::exists(model)) {
                throw FileError("model snapshot not found: " + model.string());
            }
            if (split != "train" && split != "valid" && split != "test") {
                throw ConfigError("split must be train, valid or test, got '" + split + "'");
            }
            if (window_end != 0 && window_end <= window_begin) {
                throw ConfigError("window_end must exceed window_begin");
            }
            break;
        case Command::Ablation:
            if (variants.empty()) throw ConfigError("'variants' is empty");
            break;
        case Command::GradCheck:
            if (variants.empty()) throw ConfigError("'variants' is empty");
            {
                const Hyperparams hp = grad_check_dims();
                if (hp.T < 2 || hp.T > 6 || hp.n < 1 || hp.n > 4 || hp.m < 1 || hp.m > 6) {
                    throw ConfigError("grad-check needs 2 <= T <= 6, 1 <= n <= 4, 1 <= m = p <= 6");
                }
            }
            if (!(step > 0.0) || !(tol > 0.0)) throw ConfigError("step and tol must be positive");
            break;
        case Command::SynthData:
            if (n < 1) throw ConfigError("n must be >= 1");
            if (L < 100) throw ConfigError("L must be >= 100");
            if (relevant.empty()) throw ConfigError("relevant must be nonempty");
            for (std::size_t k : relevant) {
                if (k < 1 || k > n) throw ConfigError("relevant indices must lie in 1..n");
            }
            if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
            if (synth_file.empty()) throw ConfigError("synth_file is empty");
            break;
        default:
            break;
    }
}

Hyperparams RunConfig::hyperparams(std::size_t n_series) const {
    return {T, n_series, m, p, variant};
}

Hyperparams RunConfig::grad_check_dims() const {
    const auto pick = [&](const char* key, std::size_t value, std::size_t fallback) {
        return explicitly_set.count(key) ? value : fallback;
    };
    const std::size_t hidden = pick("m", m, 4);
    return {pick("T", T, 4), pick("n", n, 3), hidden, hidden, variant};
}

TrainConfig RunConfig::train_config(std::uint64_t seed_value) const {
    TrainConfig cfg = train;
    cfg.seed = seed_value;
    return cfg;
}

}  // namespace narx
