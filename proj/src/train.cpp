#include "narx/train.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "narx/errors.hpp"

namespace narx {

void TrainConfig::validate() const {
    if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
    // lr0 = 0 is allowed as a frozen run; negative or non-finite rates are not.
    if (!(lr0 >= 0.0) || !std::isfinite(lr0)) throw ArgumentError("lr0 must be >= 0 and finite");
    if (!(decay_factor > 0.0 && decay_factor <= 1.0)) {
        throw ArgumentError("decay_factor must lie in (0, 1]");
    }
    if (decay_every < 1) throw ArgumentError("decay_every must be >= 1");
}

double lr_at(std::size_t iter, const TrainConfig& cfg) {
    return cfg.lr0 * std::pow(cfg.decay_factor, static_cast<double>(iter / cfg.decay_every));
}

AdamState::AdamState(const ParameterStore& store) {
    for (const auto& e : store) {
        first_.emplace_back(e.size(), 0.0);
        second_.emplace_back(e.size(), 0.0);
    }
}

void adam_step(ParameterStore& store, AdamState& adam, double lr) {
    if (adam.first_.size() != store.size()) {
        throw StateError("adam_step: optimizer state does not match the parameter store");
    }
    for (const auto& e : store) require_finite(e.grad, "adam_step: gradient of " + e.name);

    ++adam.step_;
    const double t = static_cast<double>(adam.step_);
    const double c1 = 1.0 - std::pow(AdamState::kBeta1, t);
    const double c2 = 1.0 - std::pow(AdamState::kBeta2, t);
    for (ParamId id = 0; id < store.size(); ++id) {
        auto& e = store.entry(id);
        auto& m = adam.first_[id];
        auto& v = adam.second_[id];
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double g = e.grad[i];
            m[i] = AdamState::kBeta1 * m[i] + (1.0 - AdamState::kBeta1) * g;
            v[i] = AdamState::kBeta2 * v[i] + (1.0 - AdamState::kBeta2) * g * g;
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            e.value[i] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::kEps);
            e.grad[i] = 0.0;
        }
    }
}

PairedSeries collect_predictions(const Model& model, std::span<const DrivingWindow> windows,
                                 const StandardizeStats& stats) {
    PairedSeries out;
    out.targets.reserve(windows.size());
    out.predictions.reserve(windows.size());
    Tape tape(model.store());
    for (const auto& w : windows) {
        tape.reset();
        const double pred = tape.scalar(model.forward(tape, w).prediction);
        out.predictions.push_back(stats.target_to_original(pred));
        out.targets.push_back(stats.target_to_original(w.y_target));
    }
    return out;
}

MetricsRecord evaluate(const Model& model, std::span<const DrivingWindow> windows,
                       const StandardizeStats& stats) {
    if (windows.empty()) throw ArgumentError("evaluate: no windows");
    return compute_metrics(collect_predictions(model, windows, stats));
}

TrainResult train(Model model, std::span<const DrivingWindow> train_set,
                  std::span<const DrivingWindow> valid_set, const StandardizeStats& stats,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty()) throw ArgumentError("train: empty training set");
    if (valid_set.empty()) throw ArgumentError("train: empty validation set");

    const auto started = std::chrono::steady_clock::now();
    TrainReport report;
    report.seed = cfg.seed;
    report.final_lr = lr_at(0, cfg);

    ParameterStore& store = model.store();
    store.zero_grad();
    AdamState adam(store);
    Tape tape(store);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    Model best = model;
    double best_rmse = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
        double epoch_sse = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const double inv_n = 1.0 / static_cast<double>(stop - start);
            const double lr = lr_at(iter, cfg);
            double batch_sse = 0.0;
            for (std::size_t b = start; b < stop; ++b) {
                const DrivingWindow& w = train_set[order[b]];
                tape.reset();
                const Var pred = model.forward(tape, w).prediction;
                const double err = tape.scalar(pred) - w.y_target;
                batch_sse += err * err;
                // d/dŷ of (1/N)(ŷ − y)²
                tape.backward(pred, store, 2.0 * err * inv_n);
            }
            const double batch_loss = batch_sse * inv_n;
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "training diverged at iteration " << iter << " (lr " << lr
                    << "): batch loss " << batch_loss;
                throw DivergenceError(msg.str());
            }
            adam_step(store, adam, lr);
            epoch_sse += batch_sse;
            ++iter;
        }
        report.epoch_losses.push_back(epoch_sse / static_cast<double>(order.size()));

        const PairedSeries valid = collect_predictions(model, valid_set, stats);
        const double valid_rmse = rmse(valid);
        report.valid_rmse.push_back(valid_rmse);
        report.valid_mae.push_back(mae(valid));
        if (valid_rmse < best_rmse) {
            best_rmse = valid_rmse;
            best = model;
            report.best_epoch = static_cast<long>(epoch);
        }
    }
    report.iterations = iter;
    report.final_lr = lr_at(iter == 0 ? 0 : iter - 1, cfg);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return {std::move(best), std::move(report)};
}

}  // namespace narx
