#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <vector>

#include "narx/data.hpp"
#include "narx/grad_check.hpp"
#include "narx/metrics.hpp"
#include "narx/model.hpp"
#include "narx/train.hpp"

namespace narx {

enum class Normalization { Standardize, None };

/// A series split, scaled with training statistics, and cut into windows.
struct PreparedData {
    RawSeries scaled;
    StandardizeStats stats;
    SplitRanges ranges;
    std::size_t T = 0;
    std::vector<DrivingWindow> train;
    std::vector<DrivingWindow> valid;
    std::vector<DrivingWindow> test;
};

/// Requires L > T and a split that fits the series.
PreparedData prepare_data(const RawSeries& raw, const SplitSpec& splits, std::size_t T,
                          Normalization normalization);

/// 70 / 15 / 15 percent of L, with the remainder going to the test split.
SplitSpec default_split(std::size_t length);

struct RunOutcome {
    Model model;
    TrainReport report;
    MetricsRecord train;
    MetricsRecord valid;
    MetricsRecord test;
};

/// Builds the model from cfg.seed, trains it, and scores every split.
RunOutcome run_training(const PreparedData& data, const Hyperparams& hp, const TrainConfig& cfg);

/// Input-attention weights averaged over windows: n x T, entry (k, t) is the
/// mean α_t^k. Requires a variant with input attention.
Mat mean_input_attention(const Model& model, std::span<const DrivingWindow> windows);

/// Mean of the rows of `alpha` listed in `rows` (0-based), per column.
std::vector<double> group_mean(const Mat& alpha, std::span<const std::size_t> rows);

struct SeedSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single value
};

SeedSummary summarize(std::span<const double> values);

/// Upper bound on concurrent runs: min(requested, NARX_ATTN_THREADS if set), at least 1.
std::size_t effective_jobs(std::size_t requested);

/// Calls task(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

/// Random window and parameters for gradient checking at the given dims.
struct GradCheckCase {
    Model model;
    DrivingWindow window;
};

GradCheckCase make_grad_check_case(const Hyperparams& hp, std::uint64_t seed);

/// Squared error of one window with weights taken from `store` (same layout
/// as model.store()).
double grad_check_loss(const Model& model, const DrivingWindow& window,
                       const ParameterStore& store);

/// Backward pass, then central differences over every parameter.
GradCheckReport check_model_gradients(GradCheckCase& c, double step, double tol);

}  // namespace narx
