#pragma once

#include <cstddef>

#include "narx/tensor.hpp"

namespace narx {

/// One training example: n driving series over T steps, the first T−1 target
/// values, and the target at the window's last step.
struct DrivingWindow {
    Mat X;               // n x T, row k is series k, column t is x_t
    Vec y_hist;          // T − 1 values
    double y_target = 0.0;
    std::size_t target_index = 0;  // absolute position in the source series

    std::size_t series_count() const noexcept { return X.rows(); }
    std::size_t steps() const noexcept { return X.cols(); }
};

}  // namespace narx
