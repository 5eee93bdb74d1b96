#include "narx/model.hpp"

#include <cmath>
#include <random>

#include "narx/errors.hpp"

namespace narx {

std::string_view variant_name(ModelVariant v) noexcept {
    switch (v) {
        case ModelVariant::NarxRnn: return "narx_rnn";
        case ModelVariant::EncoderDecoder: return "encoder_decoder";
        case ModelVariant::AttentionRnn: return "attention_rnn";
        case ModelVariant::InputAttnRnn: return "input_attn_rnn";
        case ModelVariant::DaRnn: return "da_rnn";
    }
    return "unknown";
}

ModelVariant parse_variant(std::string_view name) {
    for (ModelVariant v : kAllVariants) {
        if (variant_name(v) == name) return v;
    }
    throw ConfigError("unknown variant '" + std::string(name) +
                      "' (expected narx_rnn, encoder_decoder, attention_rnn, input_attn_rnn or "
                      "da_rnn)");
}

void Hyperparams::validate() const {
    if (T < 2) throw ArgumentError("window length T must be >= 2, got " + std::to_string(T));
    if (n < 1) throw ArgumentError("need at least one driving series");
    if (m < 1 || p < 1) throw ArgumentError("hidden sizes m and p must be >= 1");
}

namespace {

bool has_input_attention(ModelVariant v) {
    return v == ModelVariant::DaRnn || v == ModelVariant::InputAttnRnn;
}

bool has_temporal_attention(ModelVariant v) {
    return v == ModelVariant::DaRnn || v == ModelVariant::AttentionRnn;
}

// Declaration order fixes both the store layout and the RNG draw order.
template <typename Store, typename Ops>
Architecture make_architecture(Store& store, const Hyperparams& hp, Ops ops) {
    Architecture arch;
    if (hp.variant == ModelVariant::NarxRnn) {
        arch.narx = ops.lstm(store, "narx.lstm", hp.m, hp.n + 1);
        arch.head_v = ops.entry(store, "narx.head.v", hp.m, 1);
        arch.head_b = ops.entry(store, "narx.head.b", 1, 1);
        return arch;
    }
    EncoderParams enc;
    if (has_input_attention(hp.variant)) enc.attention = ops.input_attention(store, hp.T, hp.m);
    enc.lstm = ops.lstm(store, "enc.lstm", hp.m, hp.n);
    DecoderParams dec;
    if (has_temporal_attention(hp.variant)) {
        dec.attention = ops.temporal_attention(store, hp.m, hp.p);
    }
    dec.combine = ops.combine(store, hp.m);
    dec.lstm = ops.lstm(store, "dec.lstm", hp.p, 1);
    arch.encoder = enc;
    arch.decoder = dec;
    arch.output = ops.output(store, hp.m, hp.p);
    return arch;
}

struct Declare {
    LstmParams lstm(ParameterStore& s, const std::string& prefix, std::size_t h, std::size_t in) {
        return LstmParams::declare(s, prefix, h, in);
    }
    ParamId entry(ParameterStore& s, const std::string& name, std::size_t r, std::size_t c) {
        return s.add(name, r, c);
    }
    InputAttentionParams input_attention(ParameterStore& s, std::size_t T, std::size_t m) {
        return InputAttentionParams::declare(s, T, m);
    }
    TemporalAttentionParams temporal_attention(ParameterStore& s, std::size_t m, std::size_t p) {
        return TemporalAttentionParams::declare(s, m, p);
    }
    ContextCombineParams combine(ParameterStore& s, std::size_t m) {
        return ContextCombineParams::declare(s, m);
    }
    OutputParams output(ParameterStore& s, std::size_t m, std::size_t p) {
        return OutputParams::declare(s, m, p);
    }
};

struct Bind {
    LstmParams lstm(const ParameterStore& s, const std::string& prefix, std::size_t h,
                    std::size_t in) {
        return LstmParams::bind(s, prefix, h, in);
    }
    ParamId entry(const ParameterStore& s, const std::string& name, std::size_t r, std::size_t c) {
        return s.require(name, r, c);
    }
    InputAttentionParams input_attention(const ParameterStore& s, std::size_t T, std::size_t m) {
        return InputAttentionParams::bind(s, T, m);
    }
    TemporalAttentionParams temporal_attention(const ParameterStore& s, std::size_t m,
                                               std::size_t p) {
        return TemporalAttentionParams::bind(s, m, p);
    }
    ContextCombineParams combine(const ParameterStore& s, std::size_t m) {
        return ContextCombineParams::bind(s, m);
    }
    OutputParams output(const ParameterStore& s, std::size_t m, std::size_t p) {
        return OutputParams::bind(s, m, p);
    }
};

}  // namespace

bool is_bias_name(const std::string& name) {
    const auto dot = name.rfind('.');
    return name[dot == std::string::npos ? 0 : dot + 1] == 'b';
}

std::vector<std::string> expected_parameter_names(const Hyperparams& hp) {
    ParameterStore scratch;
    make_architecture(scratch, hp, Declare{});
    return scratch.names();
}

Model Model::build(const Hyperparams& hp, std::uint64_t seed) {
    hp.validate();
    ParameterStore store;
    const Architecture arch = make_architecture(store, hp, Declare{});
    std::mt19937_64 rng(seed);
    for (auto& e : store) {
        if (is_bias_name(e.name)) continue;
        // Weight vectors (ve, vd, vy, w̃, head) act as a single row.
        const std::size_t fan_in = e.cols == 1 ? e.rows : e.cols;
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : e.value) v = dist(rng);
    }
    return Model(hp, std::move(store), arch);
}

Model Model::from_store(const Hyperparams& hp, ParameterStore store) {
    hp.validate();
    const auto expected = expected_parameter_names(hp);
    if (store.names() != expected) {
        throw ShapeError("parameter snapshot does not match variant " +
                         std::string(variant_name(hp.variant)) + " (" +
                         std::to_string(store.size()) + " entries, expected " +
                         std::to_string(expected.size()) + ")");
    }
    const Architecture arch = make_architecture(store, hp, Bind{});
    return Model(hp, std::move(store), arch);
}

ForwardGraph Model::forward(Tape& tape, const DrivingWindow& window) const {
    if (window.X.rows() != hp_.n || window.X.cols() != hp_.T) {
        throw ShapeError("forward: window " + shape_string(window.X) + " but model expects " +
                         std::to_string(hp_.n) + "x" + std::to_string(hp_.T));
    }
    if (window.y_hist.size() != hp_.T - 1) {
        throw ShapeError("forward: y_hist has " + std::to_string(window.y_hist.size()) +
                         " values, expected " + std::to_string(hp_.T - 1));
    }
    ForwardGraph graph;
    if (arch_.narx) {
        LstmState state = lstm_zero_state(tape, hp_.m);
        Vec input(hp_.n + 1);
        for (std::size_t t = 0; t < hp_.T; ++t) {
            for (std::size_t k = 0; k < hp_.n; ++k) input[k] = window.X(k, t);
            input[hp_.n] = t == 0 ? 0.0 : window.y_hist[t - 1];
            state = lstm_step(tape, *arch_.narx, state, tape.constant(input));
        }
        graph.prediction =
            tape.add(tape.dot(tape.param(*arch_.head_v), state.h), tape.param(*arch_.head_b));
        return graph;
    }
    graph.encoder = encode(tape, *arch_.encoder, window.X);
    graph.decoder = decode(tape, *arch_.decoder, graph.encoder->hidden, window.y_hist);
    graph.prediction = predict(tape, *arch_.output, graph.decoder->final_state.h,
                               graph.decoder->contexts.back());
    return graph;
}

ForwardResult forward(const Model& model, const DrivingWindow& window) {
    Tape tape(model.store());
    const ForwardGraph graph = model.forward(tape, window);
    ForwardResult result;
    result.prediction = tape.scalar(graph.prediction);
    if (graph.encoder) result.encoder = read_trace(tape, *graph.encoder);
    if (graph.decoder) result.decoder = read_trace(tape, *graph.decoder);
    return result;
}

double batch_loss(const Model& model, std::span<const DrivingWindow> windows) {
    if (windows.empty()) throw ArgumentError("batch_loss: empty batch");
    Tape tape(model.store());
    double total = 0.0;
    for (const auto& w : windows) {
        tape.reset();
        const double err = tape.scalar(model.forward(tape, w).prediction) - w.y_target;
        total += err * err;
    }
    return total / static_cast<double>(windows.size());
}

}  // namespace narx
