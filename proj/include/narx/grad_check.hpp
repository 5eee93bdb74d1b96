#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "narx/parameter_store.hpp"

namespace narx {

struct GradCheckEntry {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double tolerance = 0.0;

    double worst() const;
    bool passed() const { return worst() <= tolerance; }
};

/// Compares the gradients currently held in `store` against central
/// differences (loss(θ+step) − loss(θ−step)) / (2·step), one scalar at a time.
/// Relative error is |a − n| / max(|a|, |n|, 1e-8). Every probed value is
/// restored afterwards.
GradCheckReport finite_diff_check(const std::function<double(const ParameterStore&)>& loss_fn,
                                  ParameterStore& store, double step, double tol);

}  // namespace narx
