#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "narx/data.hpp"
#include "narx/metrics.hpp"
#include "narx/model.hpp"

namespace narx {

struct TrainConfig {
    std::size_t batch_size = 128;
    double lr0 = 0.001;
    double decay_factor = 0.9;
    std::size_t decay_every = 10000;  // iterations
    std::size_t max_epochs = 10;
    std::uint64_t seed = 0;
    bool shuffle = true;

    void validate() const;
};

/// lr0 · decay_factor^floor(iter / decay_every)
double lr_at(std::size_t iter, const TrainConfig& cfg);

/// Bias-corrected Adam moments, one slot per scalar parameter.
class AdamState {
public:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    explicit AdamState(const ParameterStore& store);

    std::size_t step() const noexcept { return step_; }

private:
    friend void adam_step(ParameterStore& store, AdamState& adam, double lr);

    std::vector<std::vector<double>> first_;
    std::vector<std::vector<double>> second_;
    std::size_t step_ = 0;
};

/// One Adam update from the gradients in `store`, which are cleared afterwards.
void adam_step(ParameterStore& store, AdamState& adam, double lr);

struct TrainReport {
    std::vector<double> epoch_losses;  // mean squared error on the (scaled) training targets
    std::vector<double> valid_rmse;    // original units, one per epoch
    std::vector<double> valid_mae;
    long best_epoch = -1;              // -1 when no epoch ran
    double wall_seconds = 0.0;
    double final_lr = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
};

struct TrainResult {
    Model model;
    TrainReport report;
};

/// Shuffled minibatch Adam on the squared-error objective. After each epoch
/// the model is scored on `valid`; the snapshot with the lowest validation
/// RMSE is returned.
TrainResult train(Model model, std::span<const DrivingWindow> train_set,
                  std::span<const DrivingWindow> valid_set, const StandardizeStats& stats,
                  const TrainConfig& cfg);

/// Predictions and targets mapped back to original units.
PairedSeries collect_predictions(const Model& model, std::span<const DrivingWindow> windows,
                                 const StandardizeStats& stats);

MetricsRecord evaluate(const Model& model, std::span<const DrivingWindow> windows,
                       const StandardizeStats& stats);

}  // namespace narx
