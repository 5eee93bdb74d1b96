#include "narx/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "narx/errors.hpp"

namespace narx {

double GradCheckReport::worst() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, e.max_rel_error);
    return w;
}

GradCheckReport finite_diff_check(const std::function<double(const ParameterStore&)>& loss_fn,
                                  ParameterStore& store, double step, double tol) {
    if (!(step > 0.0)) throw ArgumentError("finite_diff_check: step must be positive");
    GradCheckReport report;
    report.tolerance = tol;
    for (ParamId id = 0; id < store.size(); ++id) {
        auto& e = store.entry(id);
        GradCheckEntry result{e.name};
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double original = e.value[i];
            e.value[i] = original + step;
            const double up = loss_fn(store);
            e.value[i] = original - step;
            const double down = loss_fn(store);
            e.value[i] = original;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("finite_diff_check: non-finite loss while probing " + e.name +
                                   "[" + std::to_string(i) + "]");
            }
            const double numeric = (up - down) / (2.0 * step);
            const double analytic = e.grad[i];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            const double rel = std::abs(analytic - numeric) / denom;
            if (i == 0 || rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_index = i;
                result.analytic = analytic;
                result.numeric = numeric;
            }
        }
        report.entries.push_back(std::move(result));
    }
    return report;
}

}  // namespace narx
