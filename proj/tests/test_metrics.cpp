#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "narx/errors.hpp"
#include "narx/metrics.hpp"

using namespace narx;

namespace {

PairedSeries from_errors(const std::vector<double>& errors, double base = 100.0) {
    PairedSeries p;
    for (double e : errors) {
        p.targets.push_back(base);
        p.predictions.push_back(base + e);
    }
    return p;
}

PairedSeries random_pairs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> level(1.0, 50.0);
    std::normal_distribution<double> noise(0.0, 3.0);
    PairedSeries p;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = level(rng) * (rng() % 2 ? 1.0 : -1.0);
        p.targets.push_back(y);
        p.predictions.push_back(y + noise(rng));
    }
    return p;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("identical series score zero everywhere") {
    const PairedSeries p{{1.5, -2.0, 7.0}, {1.5, -2.0, 7.0}};
    CHECK(rmse(p) == 0.0);
    CHECK(mae(p) == 0.0);
    CHECK(mape(p) == 0.0);
}

TEST_CASE("rmse examples") {
    CHECK(rmse({{100.0}, {110.0}}) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(rmse(from_errors({3, 4})) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
}

TEST_CASE("mae examples") {
    CHECK(mae(from_errors({-3, 3})) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(mae(from_errors({1, 2, 6})) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("mape examples") {
    CHECK(mape({{100.0}, {110.0}}) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(mape({{100.0, 200.0}, {110.0, 190.0}}) == doctest::Approx(7.5).epsilon(1e-14));
}

TEST_CASE("a zero target is a domain error naming the index") {
    try {
        mape({{4.0, 0.0, 2.0}, {4.0, 1.0, 2.0}});
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("paired series must have equal nonzero length and finite entries") {
    CHECK_THROWS_AS(rmse({{}, {}}), ArgumentError);
    CHECK_THROWS_AS(mae({{1.0, 2.0}, {1.0}}), ShapeError);
    CHECK_THROWS_AS(rmse({{1.0}, {std::nan("")}}), NumericError);
}

TEST_CASE("rmse dominates mae with equality for equal magnitudes") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        const PairedSeries p = random_pairs(rng, 1 + rng() % 20);
        CHECK(rmse(p) >= mae(p) * (1.0 - 1e-15));
        CHECK(mae(p) >= 0.0);
    }
    const PairedSeries flat = from_errors({2, -2, 2, -2});
    CHECK(rmse(flat) == doctest::Approx(mae(flat)).epsilon(1e-15));
}

TEST_CASE("metrics ignore a common permutation") {
    std::mt19937_64 rng(2);
    const PairedSeries p = random_pairs(rng, 12);
    std::vector<std::size_t> idx(12);
    for (std::size_t i = 0; i < 12; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    PairedSeries q;
    for (std::size_t i : idx) {
        q.targets.push_back(p.targets[i]);
        q.predictions.push_back(p.predictions[i]);
    }
    CHECK(rmse(q) == doctest::Approx(rmse(p)).epsilon(1e-14));
    CHECK(mae(q) == doctest::Approx(mae(p)).epsilon(1e-14));
    CHECK(mape(q) == doctest::Approx(mape(p)).epsilon(1e-14));
}

TEST_CASE("scaling both series scales rmse and mae but not mape") {
    std::mt19937_64 rng(3);
    const PairedSeries p = random_pairs(rng, 15);
    for (double c : {0.01, 2.5, 1e4}) {
        PairedSeries q = p;
        for (double& v : q.targets) v *= c;
        for (double& v : q.predictions) v *= c;
        CHECK(rmse(q) == doctest::Approx(c * rmse(p)).epsilon(1e-12));
        CHECK(mae(q) == doctest::Approx(c * mae(p)).epsilon(1e-12));
        CHECK(mape(q) == doctest::Approx(mape(p)).epsilon(1e-12));
    }
}

TEST_CASE("compute_metrics bundles all three") {
    const PairedSeries p{{100.0, 200.0}, {110.0, 190.0}};
    const MetricsRecord r = compute_metrics(p);
    CHECK(r.rmse == rmse(p));
    CHECK(r.mae == mae(p));
    CHECK(r.mape_percent == mape(p));
    CHECK(r.count == 2);
}

}  // TEST_SUITE
