#include "narx/encoder.hpp"

#include <algorithm>

#include "narx/errors.hpp"

namespace narx {

InputAttentionParams InputAttentionParams::declare(ParameterStore& store, std::size_t steps,
                                                   std::size_t hidden) {
    return {store.add_vector("enc.attn.ve", steps), store.add("enc.attn.We", steps, 2 * hidden),
            store.add("enc.attn.Ue", steps, steps), steps, hidden};
}

InputAttentionParams InputAttentionParams::bind(const ParameterStore& store, std::size_t steps,
                                                std::size_t hidden) {
    return {store.require("enc.attn.ve", steps, 1), store.require("enc.attn.We", steps, 2 * hidden),
            store.require("enc.attn.Ue", steps, steps), steps, hidden};
}

std::vector<Var> project_series(Tape& tape, const InputAttentionParams& params, const Mat& X) {
    if (X.cols() != params.steps) {
        throw ShapeError("input attention: window " + shape_string(X) + " but T = " +
                         std::to_string(params.steps));
    }
    std::vector<Var> projected;
    projected.reserve(X.rows());
    for (std::size_t k = 0; k < X.rows(); ++k) {
        projected.push_back(tape.matvec(params.Ue, tape.constant(X.row(k))));
    }
    return projected;
}

Var input_scores(Tape& tape, const InputAttentionParams& params, Var h_prev, Var s_prev,
                 std::span<const Var> projected) {
    if (projected.empty()) throw ShapeError("input_scores: no driving series");
    const Var query = tape.matvec(params.We, tape.concat({h_prev, s_prev}));
    const Var ve = tape.param(params.ve);
    std::vector<Var> scores;
    scores.reserve(projected.size());
    for (Var u : projected) scores.push_back(tape.dot(ve, tape.tanh(tape.add(query, u))));
    return tape.concat(scores);
}

Var input_scores(Tape& tape, const InputAttentionParams& params, Var h_prev, Var s_prev,
                 const Mat& X) {
    const auto projected = project_series(tape, params, X);
    return input_scores(tape, params, h_prev, s_prev, projected);
}

Var input_weights(Tape& tape, Var scores) { return tape.softmax(scores); }

Var reweigh(Tape& tape, Var alpha, Var x_t) { return tape.mul(alpha, x_t); }

EncoderGraph encode(Tape& tape, const EncoderParams& params, const Mat& X) {
    if (X.rows() != params.lstm.input_dim) {
        throw ShapeError("encode: window has " + std::to_string(X.rows()) +
                         " series, encoder expects " + std::to_string(params.lstm.input_dim));
    }
    if (X.cols() < 1) throw ShapeError("encode: empty window");
    std::vector<Var> projected;
    if (params.attention) projected = project_series(tape, *params.attention, X);

    EncoderGraph graph;
    graph.hidden.reserve(X.cols());
    LstmState state = lstm_zero_state(tape, params.lstm.hidden);
    for (std::size_t t = 0; t < X.cols(); ++t) {
        Var x_t = tape.constant(X.column(t));
        if (params.attention) {
            const Var alpha = input_weights(
                tape, input_scores(tape, *params.attention, state.h, state.s, projected));
            graph.alphas.push_back(alpha);
            x_t = reweigh(tape, alpha, x_t);
        }
        state = lstm_step(tape, params.lstm, state, x_t);
        graph.hidden.push_back(state.h);
    }
    graph.final_state = state;
    return graph;
}

EncoderTrace read_trace(const Tape& tape, const EncoderGraph& graph) {
    EncoderTrace trace;
    for (Var h : graph.hidden) trace.hidden.emplace_back(tape.value(h));
    if (!graph.alphas.empty()) {
        const std::size_t n = tape.length(graph.alphas.front());
        Mat alphas(n, graph.alphas.size());
        for (std::size_t t = 0; t < graph.alphas.size(); ++t) {
            const auto a = tape.value(graph.alphas[t]);
            for (std::size_t k = 0; k < n; ++k) alphas(k, t) = a[k];
        }
        trace.alphas = std::move(alphas);
    }
    trace.final_cell = Vec(tape.value(graph.final_state.s));
    return trace;
}

}  // namespace narx
