// Acceptance run: one PASS/FAIL line per criterion, 1 through 10.
//
// Exit status is 0 once every criterion has been evaluated, whatever the
// verdicts; pass --strict to turn any FAIL into a nonzero exit.
// Criterion 10 runs only when NARX_SML_CSV names a file (target column from
// NARX_SML_TARGET, default "target"); otherwise it prints SKIP.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "narx/experiments.hpp"
#include "narx/metrics.hpp"
#include "narx/model.hpp"
#include "narx/train.hpp"
#include "scalar_oracle.hpp"
#include "test_support.hpp"

using namespace narx;

namespace {

// Tolerances and budgets.
constexpr double kGradTol = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr double kOracleTol = 1e-12;
constexpr double kNormTol = 1e-12;
constexpr double kRelevanceFactor = 2.0;
constexpr int kRelevanceSeedsNeeded = 4;
constexpr double kNoiseRatioMax = 1.5;
constexpr double kAblationMargin = 0.05;

constexpr std::size_t kSynthSeries = 10;
constexpr std::size_t kSynthLength = 2000;
constexpr double kSynthNoise = 0.1;
constexpr std::uint64_t kSynthSeed = 0;
constexpr std::uint64_t kNoiseSeed = 1;
const std::vector<std::size_t> kRelevant{1, 2};

constexpr std::size_t kBatch = 32;
constexpr double kLr = 0.01;
constexpr std::size_t kEpochs = 20;
constexpr std::size_t kAblationEpochs = 100;

struct Verdict {
    enum class Kind { Pass, Fail, Skip } kind;
    std::string detail;
};

Verdict verdict(bool ok, std::string detail) {
    return {ok ? Verdict::Kind::Pass : Verdict::Kind::Fail, std::move(detail)};
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

TrainConfig synth_budget(std::uint64_t seed, std::size_t epochs = kEpochs) {
    TrainConfig cfg;
    cfg.batch_size = kBatch;
    cfg.lr0 = kLr;
    cfg.max_epochs = epochs;
    cfg.seed = seed;
    return cfg;
}

const RawSeries& synth_series() {
    static const RawSeries s = synth_narx(kSynthSeries, kSynthLength, kRelevant, kSynthNoise, kSynthSeed);
    return s;
}

PreparedData synth_data(std::size_t T, bool noisy = false) {
    const RawSeries raw = noisy ? inject_noise_series(synth_series(), kNoiseSeed) : synth_series();
    return prepare_data(raw, default_split(raw.length()), T, Normalization::Standardize);
}

double row_group_mean(const Mat& alpha, const std::vector<std::size_t>& rows) {
    const auto per_t = group_mean(alpha, rows);
    return mean_of(per_t);
}

Verdict gradients() {
    std::string detail;
    bool ok = true;
    double worst = 0.0;
    for (ModelVariant v : kAllVariants) {
        GradCheckCase c = make_grad_check_case({4, 3, 4, 4, v}, 0);
        const GradCheckReport r = check_model_gradients(c, kGradStep, kGradTol);
        ok = ok && r.passed();
        worst = std::max(worst, r.worst());
        if (!r.passed()) detail += std::string(variant_name(v)) + " ";
    }
    return verdict(ok, (ok ? std::string() : "failing: " + detail) + fmt("worst rel error %.3g", worst));
}

Verdict oracle_match() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const DrivingWindow w = support::random_window(3, 5, rng);
        for (ModelVariant v : kAllVariants) {
            Model model = Model::build({5, 3, 3, 3, v}, static_cast<std::uint64_t>(instance));
            support::fill_uniform(model.store(), 1000 + static_cast<std::uint64_t>(instance), 1.0);
            const double got = forward(model, w).prediction;
            const double want = oracle::predict(model.store(), v, support::rows_of(w.X),
                                                support::values_of(w.y_hist));
            worst = std::max(worst, std::abs(got - want));
        }
    }
    return verdict(worst <= kOracleTol, fmt("max |diff| %.3g over 20 instances x 5 variants", worst));
}

Verdict normalization() {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    std::uniform_real_distribution<double> scale(0.1, 3.0);
    double worst = 0.0;
    bool in_range = true;
    auto check = [&](std::span<const double> w) {
        double total = 0.0;
        for (double v : w) {
            in_range = in_range && v > 0.0 && v <= 1.0;
            total += v;
        }
        worst = std::max(worst, std::abs(total - 1.0));
    };
    for (int draw = 0; draw < 1000; ++draw) {
        const std::size_t T = dim(rng) + 1, n = dim(rng), m = dim(rng), p = dim(rng);
        Model model = Model::build({T, n, m, p, ModelVariant::DaRnn}, static_cast<std::uint64_t>(draw));
        support::fill_uniform(model.store(), rng(), scale(rng));
        const ForwardResult r = forward(model, support::random_window(n, T, rng));
        const Mat& alpha = *r.encoder->alphas;
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> col(n);
            for (std::size_t k = 0; k < n; ++k) col[k] = alpha(k, t);
            check(col);
        }
        for (const Vec& beta : r.decoder->betas) check(beta);
    }
    return verdict(worst <= kNormTol && in_range,
                   fmt("max |sum - 1| %.3g, entries in (0,1]: ", worst) + (in_range ? "yes" : "no"));
}

struct SynthRuns {
    std::vector<double> ratios;
    std::vector<double> clean_rmse;
};

const SynthRuns& relevance_runs() {
    static const SynthRuns runs = [] {
        SynthRuns out;
        const PreparedData data = synth_data(8);
        std::vector<std::size_t> relevant, irrelevant;
        for (std::size_t k = 0; k < kSynthSeries; ++k) {
            const bool rel = std::find(kRelevant.begin(), kRelevant.end(), k + 1) != kRelevant.end();
            (rel ? relevant : irrelevant).push_back(k);
        }
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const RunOutcome r = run_training(data, {8, kSynthSeries, 16, 16, ModelVariant::DaRnn},
                                              synth_budget(seed));
            const Mat alpha = mean_input_attention(r.model, data.test);
            out.ratios.push_back(row_group_mean(alpha, relevant) / row_group_mean(alpha, irrelevant));
            out.clean_rmse.push_back(r.test.rmse);
        }
        return out;
    }();
    return runs;
}

Verdict relevance() {
    const auto& ratios = relevance_runs().ratios;
    const int hits = static_cast<int>(
        std::count_if(ratios.begin(), ratios.end(), [](double r) { return r >= kRelevanceFactor; }));
    std::string detail = "relevant/irrelevant alpha ratios:";
    for (double r : ratios) detail += fmt(" %.3f", r);
    detail += fmt(" (%g of 5 at >= 2)", hits);
    return verdict(hits >= kRelevanceSeedsNeeded, detail);
}

Verdict noise_robustness() {
    const PreparedData noisy = synth_data(8, true);
    std::vector<double> noisy_rmse;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        noisy_rmse.push_back(run_training(noisy, {8, 2 * kSynthSeries, 16, 16, ModelVariant::DaRnn},
                                          synth_budget(seed))
                                 .test.rmse);
    }
    const double clean = mean_of(relevance_runs().clean_rmse);
    const double dirty = mean_of(noisy_rmse);
    return verdict(dirty <= kNoiseRatioMax * clean,
                   fmt("mean test RMSE clean %.4f noisy %.4f ratio %.3f", clean, dirty, dirty / clean));
}

Verdict ablation() {
    const PreparedData data = synth_data(8);
    auto mean_rmse = [&](ModelVariant v) {
        std::vector<double> rmse;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            rmse.push_back(run_training(data, {8, kSynthSeries, 16, 16, v}, synth_budget(seed, kAblationEpochs))
                               .test.rmse);
        }
        return mean_of(rmse);
    };
    const double da = mean_rmse(ModelVariant::DaRnn);
    const double ia = mean_rmse(ModelVariant::InputAttnRnn);
    const double ed = mean_rmse(ModelVariant::EncoderDecoder);
    const bool ok = da <= ia && ia <= ed && da <= (1.0 - kAblationMargin) * ed;
    return verdict(ok, fmt("mean test RMSE da_rnn %.4f input_attn_rnn %.4f encoder_decoder %.4f", da, ia, ed));
}

Verdict window_length() {
    const std::vector<std::size_t> grid{3, 5, 10, 15, 25};
    std::vector<PreparedData> data;
    for (std::size_t T : grid) data.push_back(synth_data(T));
    int interior = 0;
    std::string detail = "best T per seed:";
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        std::size_t best = 0;
        double best_rmse = INFINITY;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = run_training(data[i], {grid[i], kSynthSeries, 16, 16, ModelVariant::DaRnn},
                                          synth_budget(seed))
                                 .valid.rmse;
            if (v < best_rmse) {
                best_rmse = v;
                best = i;
            }
        }
        interior += best != 0 && best + 1 != grid.size();
        detail += " " + std::to_string(grid[best]);
    }
    return verdict(2 * interior > 3, detail);
}

Verdict optimizer() {
    TrainConfig cfg;
    const bool schedule = lr_at(0, cfg) == 0.001 && std::abs(lr_at(10000, cfg) - 0.0009) <= 1e-18 &&
                          lr_at(9999, cfg) == 0.001;

    Model model = Model::build({4, 3, 4, 4, ModelVariant::DaRnn}, 3);
    const ParameterStore before = model.store();
    AdamState adam(model.store());
    for (int i = 0; i < 5; ++i) adam_step(model.store(), adam, 0.01);
    const bool zero_grad = model.store().same_values(before);

    const RawSeries raw = synth_narx(3, 300, {1}, 0.1, 5);
    const PreparedData data = prepare_data(raw, default_split(raw.length()), 4, Normalization::Standardize);
    const Model start = Model::build({4, 3, 4, 4, ModelVariant::DaRnn}, 1);
    TrainConfig frozen;
    frozen.lr0 = 0.0;
    frozen.max_epochs = 3;
    frozen.batch_size = 16;
    const TrainResult trained = train(start, data.train, data.valid, data.stats, frozen);
    const bool no_op = trained.model.store().same_values(start.store());

    return verdict(schedule && zero_grad && no_op,
                   std::string("schedule ") + (schedule ? "ok" : "bad") + ", zero-gradient Adam " +
                       (zero_grad ? "ok" : "bad") + ", lr=0 training " + (no_op ? "ok" : "bad"));
}

Verdict metric_identities() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    std::uniform_int_distribution<std::size_t> len(1, 50);
    bool ordered = true;
    for (int i = 0; i < 1000; ++i) {
        PairedSeries p;
        const std::size_t n = len(rng);
        for (std::size_t j = 0; j < n; ++j) {
            p.targets.push_back(value(rng));
            p.predictions.push_back(value(rng));
        }
        ordered = ordered && rmse(p) >= mae(p);
    }
    const bool percent = std::abs(mape(PairedSeries{{100.0}, {110.0}}) - 10.0) <= 1e-12;
    const PairedSeries same{{1.5, -2.0, 3.25}, {1.5, -2.0, 3.25}};
    const bool zeros = rmse(same) == 0.0 && mae(same) == 0.0 && mape(same) == 0.0;
    return verdict(ordered && percent && zeros,
                   std::string("rmse>=mae ") + (ordered ? "ok" : "bad") + ", mape(100,110) " +
                       (percent ? "ok" : "bad") + ", identical pairs " + (zeros ? "ok" : "bad"));
}

Verdict real_data() {
    const char* path = std::getenv("NARX_SML_CSV");
    if (path == nullptr || !std::filesystem::exists(path)) {
        return {Verdict::Kind::Skip, "set NARX_SML_CSV to an SML-layout CSV to run"};
    }
    const char* target = std::getenv("NARX_SML_TARGET");
    const RawSeries raw = load_csv(path, target ? target : "target");
    const PreparedData data = prepare_data(raw, {3200, 400, 537}, 10, Normalization::Standardize);
    auto mean_rmse = [&](ModelVariant v) {
        std::vector<double> rmse;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            rmse.push_back(run_training(data, {10, raw.series_count(), 64, 64, v}, synth_budget(seed)).test.rmse);
        }
        return mean_of(rmse);
    };
    const double da = mean_rmse(ModelVariant::DaRnn);
    const double ed = mean_rmse(ModelVariant::EncoderDecoder);
    return verdict(da < ed, fmt("mean test RMSE da_rnn %.4f encoder_decoder %.4f", da, ed));
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::string_view(argv[1]) == "--strict";
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"gradient check, all variants", gradients},
        {"forward matches scalar reference", oracle_match},
        {"attention weights normalized", normalization},
        {"synthetic relevance recovery", relevance},
        {"noise robustness", noise_robustness},
        {"ablation ordering", ablation},
        {"interior window length optimum", window_length},
        {"optimizer and schedule", optimizer},
        {"metric identities", metric_identities},
        {"real-data ordering", real_data},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v{Verdict::Kind::Fail, ""};
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {Verdict::Kind::Fail, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* tag = v.kind == Verdict::Kind::Pass ? "PASS" : v.kind == Verdict::Kind::Skip ? "SKIP" : "FAIL";
        failures += v.kind == Verdict::Kind::Fail;
        std::printf("criterion %2zu  %s  %-34s %s [%.1fs]\n", i + 1, tag, criteria[i].first, v.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("acceptance complete: %d failing\n", failures);
    return strict && failures > 0 ? 1 : 0;
}
