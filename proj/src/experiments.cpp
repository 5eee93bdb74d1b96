#include "narx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "narx/errors.hpp"

namespace narx {

SplitSpec default_split(std::size_t length) {
    SplitSpec s;
    s.train_len = length * 70 / 100;
    s.valid_len = length * 15 / 100;
    s.test_len = length - s.train_len - s.valid_len;
    return s;
}

PreparedData prepare_data(const RawSeries& raw, const SplitSpec& splits, std::size_t T,
                          Normalization normalization) {
    raw.validate();
    if (T < 2) throw ArgumentError("T must be >= 2");
    if (raw.length() <= T) {
        throw DataError("series length " + std::to_string(raw.length()) +
                        " must exceed the window length T = " + std::to_string(T));
    }
    if (raw.series_count() < 1) throw DataError("dataset has no driving series");

    PreparedData out;
    out.T = T;
    out.ranges = split(raw, splits);
    if (normalization == Normalization::Standardize) {
        auto [scaled, stats] = standardize(raw, out.ranges.train);
        out.scaled = std::move(scaled);
        out.stats = std::move(stats);
    } else {
        out.scaled = raw;
        out.stats = StandardizeStats::identity(raw.series_count());
    }
    out.train = make_windows(out.scaled, T, out.ranges.train);
    out.valid = make_windows(out.scaled, T, out.ranges.valid);
    out.test = make_windows(out.scaled, T, out.ranges.test);
    if (out.train.empty() || out.valid.empty() || out.test.empty()) {
        throw DataError("a split yields no windows at T = " + std::to_string(T));
    }
    return out;
}

RunOutcome run_training(const PreparedData& data, const Hyperparams& hp, const TrainConfig& cfg) {
    Model initial = Model::build(hp, cfg.seed);
    TrainResult trained = train(std::move(initial), data.train, data.valid, data.stats, cfg);
    RunOutcome out{std::move(trained.model), std::move(trained.report), {}, {}, {}};
    out.train = evaluate(out.model, data.train, data.stats);
    out.valid = evaluate(out.model, data.valid, data.stats);
    out.test = evaluate(out.model, data.test, data.stats);
    return out;
}

Mat mean_input_attention(const Model& model, std::span<const DrivingWindow> windows) {
    if (windows.empty()) throw ArgumentError("mean_input_attention: no windows");
    const auto& hp = model.hyperparams();
    Mat total(hp.n, hp.T);
    for (const auto& w : windows) {
        const ForwardResult r = forward(model, w);
        if (!r.encoder || !r.encoder->alphas) {
            throw ArgumentError("mean_input_attention: variant " +
                                std::string(variant_name(hp.variant)) + " has no input attention");
        }
        const Mat& a = *r.encoder->alphas;
        for (std::size_t k = 0; k < hp.n; ++k) {
            for (std::size_t t = 0; t < hp.T; ++t) total(k, t) += a(k, t);
        }
    }
    for (double& v : total.flat()) v /= static_cast<double>(windows.size());
    return total;
}

std::vector<double> group_mean(const Mat& alpha, std::span<const std::size_t> rows) {
    if (rows.empty()) throw ArgumentError("group_mean: empty group");
    std::vector<double> out(alpha.cols(), 0.0);
    for (std::size_t k : rows) {
        if (k >= alpha.rows()) throw ArgumentError("group_mean: row out of range");
        for (std::size_t t = 0; t < alpha.cols(); ++t) out[t] += alpha(k, t);
    }
    for (double& v : out) v /= static_cast<double>(rows.size());
    return out;
}

SeedSummary summarize(std::span<const double> values) {
    if (values.empty()) throw ArgumentError("summarize: no values");
    SeedSummary s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::size_t effective_jobs(std::size_t requested) {
    std::size_t jobs = std::max<std::size_t>(requested, 1);
    if (const char* cap = std::getenv("NARX_ATTN_THREADS")) {
        try {
            const long limit = std::stol(cap);
            if (limit >= 1) jobs = std::min(jobs, static_cast<std::size_t>(limit));
        } catch (const std::exception&) {
            throw ConfigError(std::string("NARX_ATTN_THREADS is not an integer: '") + cap + "'");
        }
    }
    return jobs;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& task) {
    jobs = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t j = 0; j < jobs; ++j) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
}

GradCheckCase make_grad_check_case(const Hyperparams& hp, std::uint64_t seed) {
    Model model = Model::build(hp, seed);
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
    // Weights U(±1.5), biases left at zero. Wide weights spread the attention
    // pre-activations, which keeps the score weights that enter every position
    // equally (We, Wd) above finite-difference resolution.
    std::uniform_real_distribution<double> weight(-1.5, 1.5);
    for (auto& e : model.store()) {
        if (is_bias_name(e.name)) continue;
        for (double& v : e.value) v = weight(rng);
    }
    std::normal_distribution<double> unit(0.0, 1.0);
    DrivingWindow w;
    w.X = Mat(hp.n, hp.T);
    for (double& v : w.X.flat()) v = unit(rng);
    w.y_hist = Vec(hp.T - 1);
    for (double& v : w.y_hist) v = unit(rng);
    w.y_target = unit(rng);
    w.target_index = hp.T - 1;
    return {std::move(model), std::move(w)};
}

double grad_check_loss(const Model& model, const DrivingWindow& window,
                       const ParameterStore& store) {
    Tape tape(store);
    const double err = tape.scalar(model.forward(tape, window).prediction) - window.y_target;
    return err * err;
}

GradCheckReport check_model_gradients(GradCheckCase& c, double step, double tol) {
    ParameterStore& store = c.model.store();
    store.zero_grad();
    Tape tape(store);
    const Var pred = c.model.forward(tape, c.window).prediction;
    const double err = tape.scalar(pred) - c.window.y_target;
    tape.backward(pred, store, 2.0 * err);
    const Model& model = c.model;
    const DrivingWindow& window = c.window;
    return finite_diff_check(
        [&](const ParameterStore& probe) { return grad_check_loss(model, window, probe); }, store,
        step, tol);
}

}  // namespace narx
