#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "narx/errors.hpp"
#include "narx/tensor.hpp"

using namespace narx;

TEST_SUITE("ndcore") {

TEST_CASE("matvec by identity returns the input") {
    CHECK(matvec(Mat::identity(3), Vec{1, -2, 5}) == Vec{1, -2, 5});
}

TEST_CASE("matvec by a zero matrix is zero") {
    CHECK(matvec(Mat(2, 4), Vec{3, 1, 4, 1}) == Vec{0, 0});
}

TEST_CASE("matvec against a double loop") {
    CHECK(matvec(Mat{{1, 2}, {3, 4}}, Vec{1, 1}) == Vec{3, 7});

    std::mt19937_64 rng(7);
    std::normal_distribution<double> unit;
    Mat a(5, 3);
    Vec x(3);
    for (double& v : a.flat()) v = unit(rng);
    for (double& v : x) v = unit(rng);
    const Vec y = matvec(a, x);
    for (std::size_t i = 0; i < 5; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 3; ++j) acc += a(i, j) * x[j];
        CHECK(y[i] == doctest::Approx(acc).epsilon(1e-15));
    }
}

TEST_CASE("matvec shape errors name both shapes") {
    try {
        matvec(Mat(2, 3), Vec{1, 2});
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("softmax closed forms") {
    for (double c : {-7.0, 0.0, 3.5, 1e3}) {
        const Vec s = softmax(Vec{c, c, c, c});
        for (double v : s) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
    }
    const Vec s = softmax(Vec{0.0, std::log(3.0)});
    CHECK(s[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("softmax is shift invariant") {
    const Vec z{0.3, -1.2, 2.5};
    const Vec a = softmax(z);
    const Vec b = softmax(Vec{0.3 + 40.0, -1.2 + 40.0, 2.5 + 40.0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);
}

TEST_CASE("softmax stays normalized for large inputs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mag(-1e3, 1e3);
    std::uniform_int_distribution<int> len(1, 12);
    for (int trial = 0; trial < 500; ++trial) {
        Vec z(static_cast<std::size_t>(len(rng)));
        for (double& v : z) v = mag(rng);
        const Vec s = softmax(z);
        double total = 0.0;
        for (double v : s) {
            CHECK(v >= 0.0);  // far-below-max entries underflow to 0
            CHECK(v <= 1.0);
            total += v;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("softmax of an empty vector is a shape error") {
    CHECK_THROWS_AS(softmax(Vec{}), ShapeError);
}

TEST_CASE("elementwise basics") {
    CHECK(elementwise(ElementwiseOp::Sigmoid, Vec{0.0}) == Vec{0.5});
    CHECK(elementwise(ElementwiseOp::Tanh, Vec{0.0}) == Vec{0.0});
    CHECK(elementwise(ElementwiseOp::Mul, Vec{2, 3}, Vec{4, -1}) == Vec{8, -3});
    CHECK(elementwise(ElementwiseOp::Add, Vec{2, 3}, Vec{4, -1}) == Vec{6, 2});
    CHECK_THROWS_AS(elementwise(ElementwiseOp::Mul, Vec{1, 2}, Vec{1}), ShapeError);
}

TEST_CASE("sigmoid is stable at the extremes") {
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(sigmoid(800.0) == 1.0);
    CHECK(std::isfinite(sigmoid(-800.0)));
    CHECK(sigmoid(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
    CHECK(sigmoid(-2.0) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-15));
}

TEST_CASE("require_finite flags NaN and Inf") {
    CHECK_NOTHROW(require_finite(Vec{1, 2}, "v"));
    CHECK_THROWS_AS(require_finite(Vec{1, std::nan("")}, "v"), NumericError);
    CHECK_THROWS_AS(require_finite(Vec{HUGE_VAL}, "v"), NumericError);
}

}  // TEST_SUITE
