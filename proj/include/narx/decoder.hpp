#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "narx/lstm.hpp"
#include "narx/tensor.hpp"

namespace narx {

/// Temporal attention: l_t^i = vdᵀ tanh(Wd [d_{t−1}; s'_{t−1}] + Ud h_i), no bias.
struct TemporalAttentionParams {
    ParamId vd;  // m
    ParamId Wd;  // m x 2p
    ParamId Ud;  // m x m
    std::size_t encoder_hidden = 0;  // m
    std::size_t decoder_hidden = 0;  // p

    static TemporalAttentionParams declare(ParameterStore& store, std::size_t m, std::size_t p);
    static TemporalAttentionParams bind(const ParameterStore& store, std::size_t m, std::size_t p);
};

/// ỹ = w̃ᵀ [y; c] + b̃
struct ContextCombineParams {
    ParamId w;  // m + 1
    ParamId b;  // 1

    static ContextCombineParams declare(ParameterStore& store, std::size_t m);
    static ContextCombineParams bind(const ParameterStore& store, std::size_t m);
};

/// ŷ = vyᵀ (Wy [d_T; c_T] + bw) + bv
struct OutputParams {
    ParamId Wy;  // p x (p + m)
    ParamId bw;  // p
    ParamId vy;  // p
    ParamId bv;  // 1

    static OutputParams declare(ParameterStore& store, std::size_t m, std::size_t p);
    static OutputParams bind(const ParameterStore& store, std::size_t m, std::size_t p);
};

/// Decoder LSTM plus optional temporal attention. Without attention every
/// context is the final encoder state h_T.
struct DecoderParams {
    std::optional<TemporalAttentionParams> attention;
    ContextCombineParams combine;
    LstmParams lstm;  // hidden p, input 1
};

/// Ud·h_i for every encoder state.
std::vector<Var> project_hidden(Tape& tape, const TemporalAttentionParams& params,
                                std::span<const Var> hidden);

Var temporal_scores(Tape& tape, const TemporalAttentionParams& params, Var d_prev, Var sp_prev,
                    std::span<const Var> projected);
Var temporal_scores_raw(Tape& tape, const TemporalAttentionParams& params, Var d_prev,
                        Var sp_prev, std::span<const Var> hidden);

/// Softmax over the T encoder steps.
Var temporal_weights(Tape& tape, Var scores);

/// c = Σ_i β_i h_i
Var context_vector(Tape& tape, Var beta, std::span<const Var> hidden);

Var combine(Tape& tape, const ContextCombineParams& params, Var y_prev, Var c_prev);

struct DecoderGraph {
    std::vector<Var> states;    // d_1..d_T
    std::vector<Var> betas;     // β_1..β_T, empty without attention
    std::vector<Var> contexts;  // c_1..c_T
    LstmState final_state;
};

/// Decoding schedule. d_0 = s'_0 = 0 and d_1 = d_0 (no target value y_0
/// exists). For t = 1..T, c_t attends from (d_{t−1}, s'_{t−1}); for t = 2..T,
/// ỹ_{t−1} = combine(y_{t−1}, c_{t−1}) drives (d_t, s'_t) = LSTM(d_{t−1}, ỹ_{t−1}).
DecoderGraph decode(Tape& tape, const DecoderParams& params, std::span<const Var> hidden,
                    std::span<const double> y_hist);

Var predict(Tape& tape, const OutputParams& params, Var d_last, Var c_last);

struct DecoderTrace {
    std::vector<Vec> states;
    std::vector<Vec> betas;
    std::vector<Vec> contexts;
};

DecoderTrace read_trace(const Tape& tape, const DecoderGraph& graph);

}  // namespace narx
