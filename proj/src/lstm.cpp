#include "narx/lstm.hpp"

#include "narx/errors.hpp"
#include "narx/tensor.hpp"

namespace narx {

LstmParams LstmParams::declare(ParameterStore& store, const std::string& prefix,
                               std::size_t hidden, std::size_t input_dim) {
    const std::size_t cols = hidden + input_dim;
    LstmParams p;
    p.Wf = store.add(prefix + ".Wf", hidden, cols);
    p.Wi = store.add(prefix + ".Wi", hidden, cols);
    p.Wo = store.add(prefix + ".Wo", hidden, cols);
    p.Ws = store.add(prefix + ".Ws", hidden, cols);
    p.bf = store.add_vector(prefix + ".bf", hidden);
    p.bi = store.add_vector(prefix + ".bi", hidden);
    p.bo = store.add_vector(prefix + ".bo", hidden);
    p.bs = store.add_vector(prefix + ".bs", hidden);
    p.hidden = hidden;
    p.input_dim = input_dim;
    return p;
}

LstmParams LstmParams::bind(const ParameterStore& store, const std::string& prefix,
                            std::size_t hidden, std::size_t input_dim) {
    const std::size_t cols = hidden + input_dim;
    LstmParams p;
    p.Wf = store.require(prefix + ".Wf", hidden, cols);
    p.Wi = store.require(prefix + ".Wi", hidden, cols);
    p.Wo = store.require(prefix + ".Wo", hidden, cols);
    p.Ws = store.require(prefix + ".Ws", hidden, cols);
    p.bf = store.require(prefix + ".bf", hidden, 1);
    p.bi = store.require(prefix + ".bi", hidden, 1);
    p.bo = store.require(prefix + ".bo", hidden, 1);
    p.bs = store.require(prefix + ".bs", hidden, 1);
    p.hidden = hidden;
    p.input_dim = input_dim;
    return p;
}

LstmState lstm_zero_state(Tape& tape, std::size_t hidden) {
    const Vec zeros(hidden);
    return {tape.constant(zeros), tape.constant(zeros)};
}

LstmState lstm_step(Tape& tape, const LstmParams& params, LstmState state, Var input) {
    if (tape.length(input) != params.input_dim || tape.length(state.h) != params.hidden ||
        tape.length(state.s) != params.hidden) {
        throw ShapeError("lstm_step: expected hidden " + std::to_string(params.hidden) +
                         " and input " + std::to_string(params.input_dim) + ", got hidden " +
                         std::to_string(tape.length(state.h)) + "/" +
                         std::to_string(tape.length(state.s)) + " and input " +
                         std::to_string(tape.length(input)));
    }
    const Var hx = tape.concat({state.h, input});
    const Var f = tape.sigmoid(tape.add(tape.matvec(params.Wf, hx), tape.param(params.bf)));
    const Var i = tape.sigmoid(tape.add(tape.matvec(params.Wi, hx), tape.param(params.bi)));
    const Var o = tape.sigmoid(tape.add(tape.matvec(params.Wo, hx), tape.param(params.bo)));
    const Var candidate = tape.tanh(tape.add(tape.matvec(params.Ws, hx), tape.param(params.bs)));
    const Var s = tape.add(tape.mul(f, state.s), tape.mul(i, candidate));
    const Var h = tape.mul(o, tape.tanh(s));
    return {h, s};
}

}  // namespace narx
