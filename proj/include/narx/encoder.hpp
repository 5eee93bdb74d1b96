#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "narx/lstm.hpp"
#include "narx/tensor.hpp"

namespace narx {

/// Input attention: e_t^k = veᵀ tanh(We [h_{t−1}; s_{t−1}] + Ue x^k), no bias.
struct InputAttentionParams {
    ParamId ve;  // T
    ParamId We;  // T x 2m
    ParamId Ue;  // T x T
    std::size_t steps = 0;   // T
    std::size_t hidden = 0;  // m

    static InputAttentionParams declare(ParameterStore& store, std::size_t steps,
                                        std::size_t hidden);
    static InputAttentionParams bind(const ParameterStore& store, std::size_t steps,
                                     std::size_t hidden);
};

/// Encoder LSTM plus optional input attention. Without attention the LSTM
/// consumes x_t unchanged.
struct EncoderParams {
    std::optional<InputAttentionParams> attention;
    LstmParams lstm;  // hidden m, input n
};

/// Ue·x^k for every row of X. Does not depend on the step, so encode()
/// evaluates it once per window.
std::vector<Var> project_series(Tape& tape, const InputAttentionParams& params, const Mat& X);

/// Scores of all n series given precomputed projections.
Var input_scores(Tape& tape, const InputAttentionParams& params, Var h_prev, Var s_prev,
                 std::span<const Var> projected);
Var input_scores(Tape& tape, const InputAttentionParams& params, Var h_prev, Var s_prev,
                 const Mat& X);

/// Softmax over the series scores.
Var input_weights(Tape& tape, Var scores);

/// x̃_t = α_t ⊙ x_t
Var reweigh(Tape& tape, Var alpha, Var x_t);

struct EncoderGraph {
    std::vector<Var> hidden;  // h_1..h_T
    std::vector<Var> alphas;  // α_1..α_T, empty without attention
    LstmState final_state;
};

/// Runs the encoder over the window from h_0 = s_0 = 0.
EncoderGraph encode(Tape& tape, const EncoderParams& params, const Mat& X);

struct EncoderTrace {
    std::vector<Vec> hidden;     // T vectors of length m
    std::optional<Mat> alphas;   // n x T, column t is α_t
    Vec final_cell;
};

EncoderTrace read_trace(const Tape& tape, const EncoderGraph& graph);

}  // namespace narx
