#pragma once

#include <cstddef>
#include <vector>

namespace narx {

/// Targets and predictions in matching order.
struct PairedSeries {
    std::vector<double> targets;
    std::vector<double> predictions;

    /// Equal, nonzero length and finite entries.
    void validate() const;
    std::size_t size() const noexcept { return targets.size(); }
};

double rmse(const PairedSeries& p);
double mae(const PairedSeries& p);
/// Mean absolute percentage error, in percent. A zero target is a DomainError.
double mape(const PairedSeries& p);

struct MetricsRecord {
    double rmse = 0.0;
    double mae = 0.0;
    double mape_percent = 0.0;
    std::size_t count = 0;
};

MetricsRecord compute_metrics(const PairedSeries& p);

}  // namespace narx
