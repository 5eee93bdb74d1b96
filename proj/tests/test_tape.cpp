#include <doctest.h>

#include <cmath>
#include <random>

#include "narx/errors.hpp"
#include "narx/experiments.hpp"
#include "narx/grad_check.hpp"
#include "narx/tape.hpp"
#include "test_support.hpp"

using namespace narx;

namespace {

struct SmallGraph {
    ParameterStore store;
    ParamId W, a, b, c, u, w;
    std::size_t rows, cols;
    Vec x;
    bool use_tanh;

    SmallGraph(std::mt19937_64& rng) {
        std::uniform_int_distribution<std::size_t> dim(1, 5);
        rows = dim(rng);
        cols = dim(rng);
        W = store.add("W", rows, cols);
        a = store.add_vector("a", cols);
        b = store.add_vector("b", rows);
        c = store.add_vector("c", rows);
        u = store.add_vector("u", 2 * rows);
        w = store.add_vector("w", 2);
        support::fill_uniform(store, rng(), 1.0);
        x = Vec(cols);
        std::normal_distribution<double> unit;
        for (double& v : x) v = unit(rng);
        use_tanh = rng() % 2 == 0;
    }

    // Every primitive appears at least once.
    Var build(Tape& t) const {
        const Var xs = t.constant(x);
        const Var z = t.matvec(W, t.mul(xs, t.param(a)));
        const Var act = use_tanh ? t.tanh(z) : t.sigmoid(z);
        const Var g = t.sigmoid(t.add(act, t.param(b)));
        const Var s = t.softmax(t.sub(g, t.scale(t.param(c), 0.7)));
        const Var mixed = t.weighted_sum(t.param(w), std::vector<Var>{s, act});
        const Var joined = t.concat({mixed, t.tanh(z)});
        return t.add(t.dot(joined, t.param(u)), t.dot(s, s));
    }

    double loss(const ParameterStore& probe) const {
        Tape t(probe);
        return t.scalar(build(t));
    }
};

}  // namespace

TEST_SUITE("ndcore") {

TEST_CASE("derivative of x·x at 3 is 6") {
    ParameterStore store;
    const ParamId x = store.add_vector("x", 1);
    store.value(x)[0] = 3.0;
    Tape t(store);
    const Var v = t.param(x);
    const Var loss = t.dot(v, v);
    CHECK(t.scalar(loss) == 9.0);
    t.backward(loss, store);
    CHECK(store.grad(x)[0] == 6.0);
}

TEST_CASE("a parameter the loss ignores gets zero gradient") {
    ParameterStore store;
    const ParamId used = store.add_vector("used", 2);
    const ParamId unused = store.add_vector("unused", 3);
    support::fill_uniform(store, 1, 1.0);
    Tape t(store);
    const Var v = t.param(used);
    t.param(unused);
    t.backward(t.dot(v, v), store);
    for (double g : store.grad(unused)) CHECK(g == 0.0);
}

TEST_CASE("gradients accumulate over repeated uses") {
    ParameterStore store;
    const ParamId w = store.add("w", 1, 1);
    store.value(w)[0] = 2.0;
    Tape t(store);
    // loss = w·(w·1) used through matvec twice: w² → 2w
    const Var one = t.constant(1.0);
    const Var loss = t.matvec(w, t.matvec(w, one));
    t.backward(loss, store);
    CHECK(store.grad(w)[0] == doctest::Approx(4.0));
}

TEST_CASE("backward matches central differences on randomized small graphs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        SmallGraph g(rng);
        g.store.zero_grad();
        Tape t(g.store);
        t.backward(g.build(t), g.store);
        const auto report = finite_diff_check(
            [&](const ParameterStore& probe) { return g.loss(probe); }, g.store, 1e-5, 1e-4);
        CHECK_MESSAGE(report.passed(), "trial " << trial << " worst " << report.worst());
    }
}

TEST_CASE("two passes give bit-identical gradients") {
    std::mt19937_64 rng(5);
    SmallGraph g(rng);
    std::vector<std::vector<double>> first;
    for (int pass = 0; pass < 2; ++pass) {
        g.store.zero_grad();
        Tape t(g.store);
        t.backward(g.build(t), g.store);
        std::vector<std::vector<double>> grads;
        for (const auto& e : g.store) grads.push_back(e.grad);
        if (pass == 0) first = grads;
        else CHECK(grads == first);
    }
}

TEST_CASE("misuse of backward raises state and shape errors") {
    ParameterStore store;
    const ParamId p = store.add_vector("p", 2);
    Tape empty(store);
    CHECK_THROWS_AS(empty.backward(Var{0}, store), StateError);

    Tape t(store);
    const Var v = t.param(p);
    CHECK_THROWS_AS(t.backward(v, store), ShapeError);
    const Var loss = t.dot(v, v);
    CHECK_THROWS_AS(t.backward(Var{loss.id + 5}, store), StateError);
    t.backward(loss, store);
    CHECK_THROWS_AS(t.backward(loss, store), StateError);
    CHECK_THROWS_AS(t.param(p), StateError);
    t.reset();
    CHECK_NOTHROW(t.backward(t.dot(t.param(p), t.param(p)), store));
}

TEST_CASE("tape ops reject mismatched shapes") {
    ParameterStore store;
    const ParamId W = store.add("W", 2, 3);
    Tape t(store);
    CHECK_THROWS_AS(t.matvec(W, t.constant(Vec{1, 2})), ShapeError);
    CHECK_THROWS_AS(t.add(t.constant(Vec{1, 2}), t.constant(Vec{1})), ShapeError);
    CHECK_THROWS_AS(t.dot(t.constant(Vec{1, 2}), t.constant(Vec{1})), ShapeError);
}

TEST_CASE("full DA-RNN loss matches central differences") {
    const Hyperparams hp{4, 3, 5, 5, ModelVariant::DaRnn};
    GradCheckCase c = make_grad_check_case(hp, 0);
    const GradCheckReport report = check_model_gradients(c, 1e-5, 1e-4);
    CHECK_MESSAGE(report.passed(), "worst " << report.worst());
}

TEST_CASE("finite_diff_check passes on a quadratic") {
    ParameterStore store;
    const ParamId q = store.add("q", 3, 2);
    support::fill_uniform(store, 3, 2.0);
    Tape t(store);
    const Var v = t.param(q);
    t.backward(t.dot(v, v), store);
    const auto report = finite_diff_check(
        [&](const ParameterStore& s) {
            double acc = 0.0;
            for (double x : s.value(q)) acc += x * x;
            return acc;
        },
        store, 1e-5, 1e-6);
    CHECK(report.passed());
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].name == "q");
}

TEST_CASE("finite_diff_check reports a doubled gradient as relative error one half") {
    ParameterStore store;
    const ParamId q = store.add_vector("q", 4);
    support::fill_uniform(store, 4, 1.0);
    for (std::size_t i = 0; i < 4; ++i) store.grad(q)[i] = 2.0 * (2.0 * store.value(q)[i]);
    const auto report = finite_diff_check(
        [&](const ParameterStore& s) {
            double acc = 0.0;
            for (double x : s.value(q)) acc += x * x;
            return acc;
        },
        store, 1e-5, 1e-4);
    CHECK_FALSE(report.passed());
    CHECK(report.worst() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("finite_diff_check restores probed values") {
    ParameterStore store;
    store.add("q", 2, 2);
    support::fill_uniform(store, 9, 1.0);
    const ParameterStore before = store;
    finite_diff_check([](const ParameterStore& s) { return s.value(0)[0] * s.value(0)[3]; },
                      store, 1e-5, 1e-4);
    CHECK(store.same_values(before));
}

TEST_CASE("a non-finite probe names the parameter") {
    ParameterStore store;
    store.add_vector("alpha", 1);
    store.add_vector("beta", 2);
    try {
        finite_diff_check(
            [](const ParameterStore& s) {
                return s.value(1)[1] > 1e-6 ? std::nan("") : 0.0;
            },
            store, 1e-5, 1e-4);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
    }
}

}  // TEST_SUITE
