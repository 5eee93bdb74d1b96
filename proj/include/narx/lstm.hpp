#pragma once

#include <cstddef>
#include <string>

#include "narx/parameter_store.hpp"
#include "narx/tape.hpp"

namespace narx {

/// Gate weights act on the concatenation [previous hidden; input].
struct LstmParams {
    ParamId Wf, Wi, Wo, Ws;  // hidden x (hidden + input_dim)
    ParamId bf, bi, bo, bs;  // hidden
    std::size_t hidden = 0;
    std::size_t input_dim = 0;

    /// Adds `<prefix>.Wf` ... `<prefix>.bs` to the store.
    static LstmParams declare(ParameterStore& store, const std::string& prefix,
                              std::size_t hidden, std::size_t input_dim);
    /// Looks up an existing set of entries and checks their shapes.
    static LstmParams bind(const ParameterStore& store, const std::string& prefix,
                           std::size_t hidden, std::size_t input_dim);
};

struct LstmState {
    Var h;  // hidden
    Var s;  // cell
};

LstmState lstm_zero_state(Tape& tape, std::size_t hidden);

/// f = σ(Wf[h;x]+bf), i = σ(Wi[h;x]+bi), o = σ(Wo[h;x]+bo),
/// s' = f⊙s + i⊙tanh(Ws[h;x]+bs), h' = o⊙tanh(s').
LstmState lstm_step(Tape& tape, const LstmParams& params, LstmState state, Var input);

}  // namespace narx
