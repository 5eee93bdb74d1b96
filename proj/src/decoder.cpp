#include "narx/decoder.hpp"

#include "narx/errors.hpp"

namespace narx {

TemporalAttentionParams TemporalAttentionParams::declare(ParameterStore& store, std::size_t m,
                                                         std::size_t p) {
    return {store.add_vector("dec.attn.vd", m), store.add("dec.attn.Wd", m, 2 * p),
            store.add("dec.attn.Ud", m, m), m, p};
}

TemporalAttentionParams TemporalAttentionParams::bind(const ParameterStore& store, std::size_t m,
                                                      std::size_t p) {
    return {store.require("dec.attn.vd", m, 1), store.require("dec.attn.Wd", m, 2 * p),
            store.require("dec.attn.Ud", m, m), m, p};
}

ContextCombineParams ContextCombineParams::declare(ParameterStore& store, std::size_t m) {
    return {store.add_vector("dec.combine.w", m + 1), store.add_vector("dec.combine.b", 1)};
}

ContextCombineParams ContextCombineParams::bind(const ParameterStore& store, std::size_t m) {
    return {store.require("dec.combine.w", m + 1, 1), store.require("dec.combine.b", 1, 1)};
}

OutputParams OutputParams::declare(ParameterStore& store, std::size_t m, std::size_t p) {
    return {store.add("out.Wy", p, p + m), store.add_vector("out.bw", p),
            store.add_vector("out.vy", p), store.add_vector("out.bv", 1)};
}

OutputParams OutputParams::bind(const ParameterStore& store, std::size_t m, std::size_t p) {
    return {store.require("out.Wy", p, p + m), store.require("out.bw", p, 1),
            store.require("out.vy", p, 1), store.require("out.bv", 1, 1)};
}

std::vector<Var> project_hidden(Tape& tape, const TemporalAttentionParams& params,
                                std::span<const Var> hidden) {
    std::vector<Var> projected;
    projected.reserve(hidden.size());
    for (Var h : hidden) projected.push_back(tape.matvec(params.Ud, h));
    return projected;
}

Var temporal_scores(Tape& tape, const TemporalAttentionParams& params, Var d_prev, Var sp_prev,
                    std::span<const Var> projected) {
    if (projected.empty()) throw ShapeError("temporal_scores: no encoder states");
    const Var query = tape.matvec(params.Wd, tape.concat({d_prev, sp_prev}));
    const Var vd = tape.param(params.vd);
    std::vector<Var> scores;
    scores.reserve(projected.size());
    for (Var u : projected) scores.push_back(tape.dot(vd, tape.tanh(tape.add(query, u))));
    return tape.concat(scores);
}

Var temporal_scores_raw(Tape& tape, const TemporalAttentionParams& params, Var d_prev,
                        Var sp_prev, std::span<const Var> hidden) {
    const auto projected = project_hidden(tape, params, hidden);
    return temporal_scores(tape, params, d_prev, sp_prev, projected);
}

Var temporal_weights(Tape& tape, Var scores) { return tape.softmax(scores); }

Var context_vector(Tape& tape, Var beta, std::span<const Var> hidden) {
    return tape.weighted_sum(beta, hidden);
}

Var combine(Tape& tape, const ContextCombineParams& params, Var y_prev, Var c_prev) {
    if (tape.length(y_prev) != 1) throw ShapeError("combine: y_prev must be a scalar");
    const Var joined = tape.concat({y_prev, c_prev});
    return tape.add(tape.dot(tape.param(params.w), joined), tape.param(params.b));
}

DecoderGraph decode(Tape& tape, const DecoderParams& params, std::span<const Var> hidden,
                    std::span<const double> y_hist) {
    const std::size_t steps = hidden.size();
    if (steps < 2) throw ShapeError("decode: need at least 2 encoder states");
    if (y_hist.size() != steps - 1) {
        throw ShapeError("decode: y_hist has " + std::to_string(y_hist.size()) +
                         " values, expected T − 1 = " + std::to_string(steps - 1));
    }
    if (params.lstm.input_dim != 1) throw ShapeError("decode: decoder LSTM input must be 1");

    std::vector<Var> projected;
    if (params.attention) projected = project_hidden(tape, *params.attention, hidden);

    DecoderGraph graph;
    auto context_from = [&](const LstmState& prev) {
        if (!params.attention) return hidden.back();
        const Var beta = temporal_weights(
            tape, temporal_scores(tape, *params.attention, prev.h, prev.s, projected));
        graph.betas.push_back(beta);
        return context_vector(tape, beta, hidden);
    };

    LstmState state = lstm_zero_state(tape, params.lstm.hidden);
    graph.contexts.push_back(context_from(state));  // c_1 from d_0
    graph.states.push_back(state.h);                // d_1 = d_0
    for (std::size_t t = 2; t <= steps; ++t) {
        const LstmState prev = state;
        const Var y_prev = tape.constant(y_hist[t - 2]);
        const Var y_tilde = combine(tape, params.combine, y_prev, graph.contexts[t - 2]);
        state = lstm_step(tape, params.lstm, prev, y_tilde);
        graph.contexts.push_back(context_from(prev));
        graph.states.push_back(state.h);
    }
    graph.final_state = state;
    return graph;
}

Var predict(Tape& tape, const OutputParams& params, Var d_last, Var c_last) {
    const Var joined = tape.concat({d_last, c_last});
    const Var hidden = tape.add(tape.matvec(params.Wy, joined), tape.param(params.bw));
    return tape.add(tape.dot(tape.param(params.vy), hidden), tape.param(params.bv));
}

DecoderTrace read_trace(const Tape& tape, const DecoderGraph& graph) {
    DecoderTrace trace;
    for (Var d : graph.states) trace.states.emplace_back(tape.value(d));
    for (Var b : graph.betas) trace.betas.emplace_back(tape.value(b));
    for (Var c : graph.contexts) trace.contexts.emplace_back(tape.value(c));
    return trace;
}

}  // namespace narx
