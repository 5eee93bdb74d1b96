#include "narx/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "narx/errors.hpp"

namespace narx {

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("Mat: " + std::to_string(data_.size()) + " values for shape " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("Mat: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vec Mat::column(std::size_t c) const {
    Vec out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

std::string shape_string(const Mat& m) {
    return "Mat(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

std::string shape_string(std::span<const double> v) {
    return "Vec(" + std::to_string(v.size()) + ")";
}

void require_finite(std::span<const double> values, const std::string& what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw NumericError(what + ": non-finite value at index " + std::to_string(i));
        }
    }
}

void matvec_into(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> x, std::span<double> y) {
    const double* row = a.data();
    for (std::size_t i = 0; i < rows; ++i, row += cols) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

Vec matvec(const Mat& a, std::span<const double> x) {
    if (a.cols() != x.size()) {
        throw ShapeError("matvec: " + shape_string(a) + " times " + shape_string(x));
    }
    Vec y(a.rows());
    matvec_into(a.flat(), a.rows(), a.cols(), x, y);
    return y;
}

Vec softmax(std::span<const double> z) {
    if (z.empty()) throw ShapeError("softmax: empty input");
    const double top = *std::max_element(z.begin(), z.end());
    Vec out(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - top);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Vec elementwise(ElementwiseOp op, std::span<const double> a, std::span<const double> b) {
    const bool binary = op == ElementwiseOp::Add || op == ElementwiseOp::Mul;
    if (binary && a.size() != b.size()) {
        throw ShapeError("elementwise: " + shape_string(a) + " vs " + shape_string(b));
    }
    if (!binary && !b.empty()) throw ShapeError("elementwise: unary op given two operands");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        switch (op) {
            case ElementwiseOp::Add: out[i] = a[i] + b[i]; break;
            case ElementwiseOp::Mul: out[i] = a[i] * b[i]; break;
            case ElementwiseOp::Tanh: out[i] = std::tanh(a[i]); break;
            case ElementwiseOp::Sigmoid: out[i] = sigmoid(a[i]); break;
        }
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("dot: " + shape_string(a) + " vs " + shape_string(b));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Vec concat(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return Vec(std::move(out));
}

}  // namespace narx
