#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace narx {

/// Dense vector of doubles.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t len, double fill = 0.0) : data_(len, fill) {}
    Vec(std::initializer_list<double> values) : data_(values) {}
    explicit Vec(std::vector<double> values) : data_(std::move(values)) {}
    explicit Vec(std::span<const double> values) : data_(values.begin(), values.end()) {}

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    operator std::span<const double>() const noexcept { return data_; }
    operator std::span<double>() noexcept { return data_; }

    const std::vector<double>& values() const noexcept { return data_; }

    friend bool operator==(const Vec&, const Vec&) = default;

private:
    std::vector<double> data_;
};

/// Dense row-major matrix of doubles.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    Vec column(std::size_t c) const;

    std::span<const double> flat() const noexcept { return data_; }
    std::span<double> flat() noexcept { return data_; }

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::string shape_string(const Mat& m);
std::string shape_string(std::span<const double> v);

/// Throws NumericError naming `what` if any entry is NaN or Inf.
void require_finite(std::span<const double> values, const std::string& what);

Vec matvec(const Mat& a, std::span<const double> x);

/// Row-major matvec over a raw buffer, y = A x with A rows x cols.
void matvec_into(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> x, std::span<double> y);

/// Max-subtracted softmax.
Vec softmax(std::span<const double> z);

enum class ElementwiseOp { Add, Mul, Tanh, Sigmoid };

/// Unary ops take only `a`; binary ops require equal lengths.
Vec elementwise(ElementwiseOp op, std::span<const double> a, std::span<const double> b = {});

double sigmoid(double x) noexcept;
double dot(std::span<const double> a, std::span<const double> b);
Vec concat(std::span<const double> a, std::span<const double> b);

}  // namespace narx
