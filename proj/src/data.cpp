#include "narx/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <string_view>

#include "narx/errors.hpp"

namespace narx {

void RawSeries::validate() const {
    if (driving.cols() != target.size()) {
        throw ShapeError("RawSeries: driving length " + std::to_string(driving.cols()) +
                         " != target length " + std::to_string(target.size()));
    }
    if (driving_names.size() != driving.rows()) {
        throw ShapeError("RawSeries: " + std::to_string(driving_names.size()) + " names for " +
                         std::to_string(driving.rows()) + " series");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RawSeries load_csv(const std::filesystem::path& path, const std::string& target_column) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_fields(line);
    std::vector<std::string> names(header.begin(), header.end());
    const auto target_it = std::find(names.begin(), names.end(), target_column);
    if (target_it == names.end()) {
        throw ConfigError(path.string() + ": target column '" + target_column + "' not found");
    }
    const std::size_t target_col = static_cast<std::size_t>(target_it - names.begin());

    std::vector<std::vector<double>> columns(names.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != names.size()) {
            throw FormatError(path.string() + ": row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(names.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            const auto f = fields[c];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
                throw ParseError(path.string() + ": row " + std::to_string(row) + ", column " +
                                 std::to_string(c + 1) + " ('" + names[c] +
                                 "'): not a number: '" + std::string(f) + "'");
            }
            columns[c].push_back(v);
        }
    }
    const std::size_t length = columns[target_col].size();
    if (length == 0) throw FormatError(path.string() + ": no data rows");

    RawSeries series;
    series.target = Vec(std::move(columns[target_col]));
    series.target_name = target_column;
    series.driving = Mat(names.size() - 1, length);
    std::size_t k = 0;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c == target_col) continue;
        std::copy(columns[c].begin(), columns[c].end(), series.driving.row(k).begin());
        series.driving_names.push_back(names[c]);
        ++k;
    }
    return series;
}

void write_csv(const RawSeries& series, const std::filesystem::path& path) {
    series.validate();
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    for (const auto& name : series.driving_names) out << name << ',';
    out << series.target_name << '\n';
    for (std::size_t t = 0; t < series.length(); ++t) {
        for (std::size_t k = 0; k < series.series_count(); ++k) {
            out << format_double(series.driving(k, t)) << ',';
        }
        out << format_double(series.target[t]) << '\n';
    }
    if (!out) throw FileError("write failed: " + path.string());
}

SplitRanges split(std::size_t length, const SplitSpec& spec) {
    if (spec.train_len == 0 || spec.valid_len == 0 || spec.test_len == 0) {
        throw ArgumentError("split: every split length must be positive");
    }
    const std::size_t total = spec.train_len + spec.valid_len + spec.test_len;
    if (total > length) {
        throw ArgumentError("split: " + std::to_string(spec.train_len) + "/" +
                            std::to_string(spec.valid_len) + "/" + std::to_string(spec.test_len) +
                            " needs " + std::to_string(total) + " points, series has " +
                            std::to_string(length));
    }
    SplitRanges r;
    r.train = {0, spec.train_len};
    r.valid = {r.train.end, r.train.end + spec.valid_len};
    r.test = {r.valid.end, r.valid.end + spec.test_len};
    return r;
}

StandardizeStats StandardizeStats::identity(std::size_t n) {
    return {Vec(n, 0.0), Vec(n, 1.0), 0.0, 1.0};
}

RawSeries StandardizeStats::apply(const RawSeries& series) const {
    RawSeries out = series;
    for (std::size_t k = 0; k < series.series_count(); ++k) {
        for (double& v : out.driving.row(k)) v = (v - driving_mean[k]) / driving_std[k];
    }
    for (double& v : out.target) v = (v - target_mean) / target_std;
    return out;
}

RawSeries StandardizeStats::invert(const RawSeries& series) const {
    RawSeries out = series;
    for (std::size_t k = 0; k < series.series_count(); ++k) {
        for (double& v : out.driving.row(k)) v = v * driving_std[k] + driving_mean[k];
    }
    for (double& v : out.target) v = target_to_original(v);
    return out;
}

namespace {

std::pair<double, double> mean_std(std::span<const double> values, IndexRange range,
                                   const std::string& name) {
    double mean = 0.0;
    for (std::size_t i = range.begin; i < range.end; ++i) mean += values[i];
    mean /= static_cast<double>(range.size());
    double var = 0.0;
    for (std::size_t i = range.begin; i < range.end; ++i) {
        const double d = values[i] - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(range.size()));
    if (!(sd > 0.0)) {
        throw DataError("standardize: series '" + name + "' is constant over the training range");
    }
    return {mean, sd};
}

}  // namespace

std::pair<RawSeries, StandardizeStats> standardize(const RawSeries& series, IndexRange train) {
    series.validate();
    if (train.size() == 0 || train.end > series.length()) {
        throw ArgumentError("standardize: invalid training range");
    }
    StandardizeStats stats;
    stats.driving_mean = Vec(series.series_count());
    stats.driving_std = Vec(series.series_count());
    for (std::size_t k = 0; k < series.series_count(); ++k) {
        const auto [mu, sd] = mean_std(series.driving.row(k), train, series.driving_names[k]);
        stats.driving_mean[k] = mu;
        stats.driving_std[k] = sd;
    }
    const auto [mu, sd] = mean_std(series.target, train, series.target_name);
    stats.target_mean = mu;
    stats.target_std = sd;
    return {stats.apply(series), stats};
}

std::vector<DrivingWindow> make_windows(const RawSeries& series, std::size_t T, IndexRange range) {
    if (T < 2) throw ArgumentError("make_windows: T must be >= 2");
    if (range.end > series.length()) throw ArgumentError("make_windows: range exceeds series");
    std::vector<DrivingWindow> windows;
    const std::size_t first = std::max(range.begin, T - 1);
    if (first >= range.end) return windows;
    windows.reserve(range.end - first);
    const std::size_t n = series.series_count();
    for (std::size_t t = first; t < range.end; ++t) {
        const std::size_t start = t + 1 - T;
        DrivingWindow w;
        w.X = Mat(n, T);
        for (std::size_t k = 0; k < n; ++k) {
            const auto row = series.driving.row(k);
            std::copy(row.begin() + start, row.begin() + t + 1, w.X.row(k).begin());
        }
        w.y_hist = Vec(std::span<const double>(series.target.data() + start, T - 1));
        w.y_target = series.target[t];
        w.target_index = t;
        windows.push_back(std::move(w));
    }
    return windows;
}

RawSeries inject_noise_series(const RawSeries& series, std::uint64_t seed) {
    series.validate();
    const std::size_t n = series.series_count();
    const std::size_t L = series.length();
    RawSeries out;
    out.target = series.target;
    out.target_name = series.target_name;
    out.driving = Mat(2 * n, L);
    out.driving_names = series.driving_names;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(L);
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = series.driving.row(k);
        std::copy(src.begin(), src.end(), out.driving.row(k).begin());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        auto dst = out.driving.row(n + k);
        for (std::size_t t = 0; t < L; ++t) dst[t] = src[order[t]];
        out.driving_names.push_back(series.driving_names[k] + "_perm");
    }
    return out;
}

RawSeries synth_narx(std::size_t n, std::size_t L, const std::vector<std::size_t>& relevant,
                     double noise_std, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("synth_narx: n must be >= 1");
    if (L < 100) throw ArgumentError("synth_narx: L must be >= 100");
    if (relevant.empty()) throw ArgumentError("synth_narx: relevant set is empty");
    for (std::size_t k : relevant) {
        if (k < 1 || k > n) {
            throw ArgumentError("synth_narx: relevant index " + std::to_string(k) +
                                " outside 1.." + std::to_string(n));
        }
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw ArgumentError("synth_narx: noise_std must be finite and >= 0");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    constexpr double kPhi = 0.9;
    RawSeries out;
    out.driving = Mat(n, L);
    out.target = Vec(L);
    out.target_name = "y";
    for (std::size_t k = 0; k < n; ++k) {
        out.driving_names.push_back("x" + std::to_string(k + 1));
        auto row = out.driving.row(k);
        row[0] = unit(rng) / std::sqrt(1.0 - kPhi * kPhi);  // stationary start
        for (std::size_t t = 1; t < L; ++t) row[t] = kPhi * row[t - 1] + unit(rng);
    }
    double prev = 0.0;
    for (std::size_t t = 0; t < L; ++t) {
        double drive = 0.0;
        for (std::size_t k : relevant) drive += out.driving(k - 1, t);
        const double noise = noise_std > 0.0 ? noise_std * unit(rng) : 0.0;
        out.target[t] = std::tanh(drive) + 0.5 * prev + noise;
        prev = out.target[t];
    }
    return out;
}

}  // namespace narx
