#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "narx/parameter_store.hpp"

namespace narx {

/// Handle to a node on a Tape.
struct Var {
    std::uint32_t id = 0;
};

/// Reverse-mode differentiation tape over vector-valued nodes.
///
/// Nodes are appended in evaluation order, so every node only references
/// earlier nodes and one reverse sweep visits each node once. Parameter
/// leaves and matvec weights read directly from the bound ParameterStore;
/// backward() adds into the store's gradient slots, so gradients from several
/// uses of the same parameter (or several tapes) accumulate.
class Tape {
public:
    explicit Tape(const ParameterStore& store) : store_(&store) {}

    /// Drops all nodes but keeps allocated capacity.
    void reset();

    std::size_t size() const noexcept { return nodes_.size(); }

    Var constant(std::span<const double> values);
    Var constant(double value);
    /// Leaf holding the current value of a store entry (flattened).
    Var param(ParamId id);

    /// W x where W is a store entry used as a rows x cols matrix.
    Var matvec(ParamId w, Var x);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double factor);
    Var tanh(Var a);
    Var sigmoid(Var a);
    Var softmax(Var a);
    /// Scalar (length-1) inner product.
    Var dot(Var a, Var b);
    Var concat(std::span<const Var> parts);
    Var concat(std::initializer_list<Var> parts) { return concat(std::span(parts.begin(), parts.size())); }
    /// sum_i w[i] * parts[i]; all parts share one length and w has parts.size() entries.
    Var weighted_sum(Var w, std::span<const Var> parts);

    std::span<const double> value(Var v) const;
    double scalar(Var v) const;
    std::size_t length(Var v) const { return node(v).len; }

    /// Propagates d(loss)/d(node) from a scalar loss node, scaled by `seed`,
    /// into the gradient slots of `grads` (normally the bound store).
    /// A tape can be swept once; reset() before recording again.
    void backward(Var loss, ParameterStore& grads, double seed = 1.0);

private:
    enum class Op : std::uint8_t {
        Constant, Param, MatVec, Add, Sub, Mul, Scale, Tanh, Sigmoid, Softmax, Dot, Concat,
        WeightedSum
    };

    struct Node {
        Op op;
        std::uint32_t offset;
        std::uint32_t len;
        std::uint32_t arg_begin;
        std::uint32_t arg_count;
        std::uint32_t param;  // store id for Param / MatVec
        double factor;        // Scale
    };

    const Node& node(Var v) const;
    Var push(Op op, std::size_t len, std::initializer_list<Var> args, std::uint32_t param = 0,
             double factor = 0.0);
    Var push_args(Op op, std::size_t len, std::span<const Var> args);
    double* val(const Node& n) { return values_.data() + n.offset; }
    const double* val(const Node& n) const { return values_.data() + n.offset; }
    const Node& arg(const Node& n, std::size_t k) const { return nodes_[args_[n.arg_begin + k]]; }
    void require_same(Var a, Var b, const char* op) const;

    const ParameterStore* store_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> args_;
    std::vector<double> values_;
    std::vector<double> grads_;
    bool swept_ = false;
};

}  // namespace narx
