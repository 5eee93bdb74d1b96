#include "narx/metrics.hpp"

#include <cmath>
#include <string>

#include "narx/errors.hpp"
#include "narx/tensor.hpp"

namespace narx {

void PairedSeries::validate() const {
    if (targets.empty()) throw ArgumentError("metrics: empty series");
    if (targets.size() != predictions.size()) {
        throw ShapeError("metrics: " + std::to_string(targets.size()) + " targets vs " +
                         std::to_string(predictions.size()) + " predictions");
    }
    require_finite(targets, "metrics targets");
    require_finite(predictions, "metrics predictions");
}

double rmse(const PairedSeries& p) {
    p.validate();
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double e = p.targets[i] - p.predictions[i];
        total += e * e;
    }
    return std::sqrt(total / static_cast<double>(p.size()));
}

double mae(const PairedSeries& p) {
    p.validate();
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p.targets[i] - p.predictions[i]);
    return total / static_cast<double>(p.size());
}

double mape(const PairedSeries& p) {
    p.validate();
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.targets[i] == 0.0) {
            throw DomainError("mape: zero target at index " + std::to_string(i));
        }
        total += std::abs((p.targets[i] - p.predictions[i]) / p.targets[i]);
    }
    return total / static_cast<double>(p.size()) * 100.0;
}

MetricsRecord compute_metrics(const PairedSeries& p) {
    return {rmse(p), mae(p), mape(p), p.size()};
}

}  // namespace narx
