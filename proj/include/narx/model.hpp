#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "narx/decoder.hpp"
#include "narx/encoder.hpp"
#include "narx/parameter_store.hpp"
#include "narx/tape.hpp"
#include "narx/window.hpp"

namespace narx {

enum class ModelVariant { NarxRnn, EncoderDecoder, AttentionRnn, InputAttnRnn, DaRnn };

inline constexpr ModelVariant kAllVariants[] = {ModelVariant::NarxRnn, ModelVariant::EncoderDecoder,
                                                ModelVariant::AttentionRnn,
                                                ModelVariant::InputAttnRnn, ModelVariant::DaRnn};

/// Config spelling: narx_rnn, encoder_decoder, attention_rnn, input_attn_rnn, da_rnn.
std::string_view variant_name(ModelVariant v) noexcept;
ModelVariant parse_variant(std::string_view name);

struct Hyperparams {
    std::size_t T = 10;  // window length
    std::size_t n = 1;   // driving series
    std::size_t m = 64;  // encoder hidden
    std::size_t p = 64;  // decoder hidden
    ModelVariant variant = ModelVariant::DaRnn;

    void validate() const;
};

/// Parameter handles of one variant. Exactly one of `narx` / (`encoder`,
/// `decoder`, `output`) is populated.
struct Architecture {
    std::optional<EncoderParams> encoder;
    std::optional<DecoderParams> decoder;
    std::optional<OutputParams> output;

    // NARX RNN baseline: one LSTM over [x_t; y_{t−1}] and a linear head.
    std::optional<LstmParams> narx;
    std::optional<ParamId> head_v;
    std::optional<ParamId> head_b;
};

struct ForwardGraph {
    Var prediction;
    std::optional<EncoderGraph> encoder;
    std::optional<DecoderGraph> decoder;
};

struct ForwardResult {
    double prediction = 0.0;
    std::optional<EncoderTrace> encoder;
    std::optional<DecoderTrace> decoder;
};

/// One variant of the ablation ladder with its weights.
class Model {
public:
    /// Weights ~ U[−1/√fan_in, 1/√fan_in] row by row, biases zero.
    static Model build(const Hyperparams& hp, std::uint64_t seed);
    /// Adopts an existing store (e.g. a loaded snapshot); names and shapes
    /// must match the variant exactly.
    static Model from_store(const Hyperparams& hp, ParameterStore store);

    const Hyperparams& hyperparams() const noexcept { return hp_; }
    const ParameterStore& store() const noexcept { return store_; }
    ParameterStore& store() noexcept { return store_; }
    const Architecture& architecture() const noexcept { return arch_; }

    /// Records the forward pass on `tape`. Weights are read from the tape's
    /// store, which must be store() or a store with the same layout.
    ForwardGraph forward(Tape& tape, const DrivingWindow& window) const;

private:
    Model(const Hyperparams& hp, ParameterStore store, Architecture arch)
        : hp_(hp), store_(std::move(store)), arch_(arch) {}

    Hyperparams hp_;
    ParameterStore store_;
    Architecture arch_;
};

/// Biases are the entries whose last name component starts with 'b'.
bool is_bias_name(const std::string& name);

/// Names the store of `hp.variant` must contain, in declaration order.
std::vector<std::string> expected_parameter_names(const Hyperparams& hp);

ForwardResult forward(const Model& model, const DrivingWindow& window);

/// (1/N) Σ (ŷ − y)²
double batch_loss(const Model& model, std::span<const DrivingWindow> windows);

}  // namespace narx
