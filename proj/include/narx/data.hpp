#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "narx/tensor.hpp"
#include "narx/window.hpp"

namespace narx {

/// Driving series (one row each) plus the target, all of length L.
struct RawSeries {
    Mat driving;  // n x L
    Vec target;   // L
    std::vector<std::string> driving_names;
    std::string target_name = "target";

    std::size_t length() const noexcept { return target.size(); }
    std::size_t series_count() const noexcept { return driving.rows(); }
    void validate() const;
};

/// Reads a comma-separated file with a header row. The target column is
/// picked by name; all other columns become driving series in file order.
RawSeries load_csv(const std::filesystem::path& path, const std::string& target_column);

/// Writes driving columns followed by the target column, 17 significant digits.
void write_csv(const RawSeries& series, const std::filesystem::path& path);

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct SplitSpec {
    std::size_t train_len = 0;
    std::size_t valid_len = 0;
    std::size_t test_len = 0;
};

struct SplitRanges {
    IndexRange train;
    IndexRange valid;
    IndexRange test;
};

/// Chronological, contiguous train/valid/test ranges starting at index 0.
SplitRanges split(std::size_t length, const SplitSpec& spec);
inline SplitRanges split(const RawSeries& series, const SplitSpec& spec) {
    return split(series.length(), spec);
}

/// Per-series mean and (population) standard deviation from the training range.
struct StandardizeStats {
    Vec driving_mean;
    Vec driving_std;
    double target_mean = 0.0;
    double target_std = 1.0;

    /// Mean 0 / std 1 for every series, i.e. no transform.
    static StandardizeStats identity(std::size_t n);

    RawSeries apply(const RawSeries& series) const;
    RawSeries invert(const RawSeries& series) const;
    double target_to_original(double standardized) const noexcept {
        return standardized * target_std + target_mean;
    }
};

std::pair<RawSeries, StandardizeStats> standardize(const RawSeries& series, IndexRange train);

/// One window per target index t in `range` with t ≥ T − 1. History may reach
/// back before range.begin; targets never leave the range.
std::vector<DrivingWindow> make_windows(const RawSeries& series, std::size_t T, IndexRange range);

/// Appends, for each driving row, a copy shuffled in time by an independent
/// seeded permutation. Original rows and the target are untouched.
RawSeries inject_noise_series(const RawSeries& series, std::uint64_t seed);

/// AR(1) drivers x_t = 0.9 x_{t−1} + ε and target
/// y_t = tanh(Σ_{k∈relevant} x^k_t) + 0.5 y_{t−1} + η, η ~ N(0, noise_std²).
/// `relevant` holds 1-based series indices.
RawSeries synth_narx(std::size_t n, std::size_t L, const std::vector<std::size_t>& relevant,
                     double noise_std, std::uint64_t seed);

}  // namespace narx
