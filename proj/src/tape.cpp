#include "narx/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "narx/errors.hpp"
#include "narx/tensor.hpp"

namespace narx {

void Tape::reset() {
    nodes_.clear();
    args_.clear();
    values_.clear();
    swept_ = false;
}

const Tape::Node& Tape::node(Var v) const {
    if (v.id >= nodes_.size()) {
        throw StateError("tape: node " + std::to_string(v.id) + " has not been recorded");
    }
    return nodes_[v.id];
}

Var Tape::push(Op op, std::size_t len, std::initializer_list<Var> args, std::uint32_t param,
               double factor) {
    if (swept_) throw StateError("tape: recording after backward; call reset() first");
    Node n{op,
           static_cast<std::uint32_t>(values_.size()),
           static_cast<std::uint32_t>(len),
           static_cast<std::uint32_t>(args_.size()),
           static_cast<std::uint32_t>(args.size()),
           param,
           factor};
    for (Var a : args) args_.push_back(a.id);
    values_.resize(values_.size() + len);
    nodes_.push_back(n);
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::push_args(Op op, std::size_t len, std::span<const Var> args) {
    Var v = push(op, len, {});
    Node& n = nodes_.back();
    n.arg_count = static_cast<std::uint32_t>(args.size());
    for (Var a : args) args_.push_back(a.id);
    return v;
}

void Tape::require_same(Var a, Var b, const char* op) const {
    const auto la = node(a).len;
    const auto lb = node(b).len;
    if (la != lb) {
        throw ShapeError(std::string(op) + ": Vec(" + std::to_string(la) + ") vs Vec(" +
                         std::to_string(lb) + ")");
    }
}

Var Tape::constant(std::span<const double> values) {
    if (values.empty()) throw ShapeError("constant: empty vector");
    const double* base = values_.data();
    if (values.data() >= base && values.data() < base + values_.size()) {
        const std::vector<double> copy(values.begin(), values.end());
        return constant(copy);
    }
    Var v = push(Op::Constant, values.size(), {});
    std::copy(values.begin(), values.end(), val(nodes_.back()));
    return v;
}

Var Tape::constant(double value) {
    return constant(std::span<const double>(&value, 1));
}

Var Tape::param(ParamId id) {
    const auto& e = store_->entry(id);
    Var v = push(Op::Param, e.size(), {}, static_cast<std::uint32_t>(id));
    std::copy(e.value.begin(), e.value.end(), val(nodes_.back()));
    return v;
}

Var Tape::matvec(ParamId w, Var x) {
    const auto& e = store_->entry(w);
    if (e.cols != node(x).len) {
        throw ShapeError("matvec: Mat(" + std::to_string(e.rows) + "x" + std::to_string(e.cols) +
                         ") '" + e.name + "' times Vec(" + std::to_string(node(x).len) + ")");
    }
    Var v = push(Op::MatVec, e.rows, {x}, static_cast<std::uint32_t>(w));
    const Node& n = nodes_.back();
    matvec_into(e.value, e.rows, e.cols, {val(nodes_[x.id]), e.cols}, {val(n), e.rows});
    return v;
}

Var Tape::add(Var a, Var b) {
    require_same(a, b, "add");
    Var v = push(Op::Add, node(a).len, {a, b});
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    const double* pb = val(nodes_[b.id]);
    double* out = val(n);
    for (std::size_t i = 0; i < n.len; ++i) out[i] = pa[i] + pb[i];
    return v;
}

Var Tape::sub(Var a, Var b) {
    require_same(a, b, "sub");
    Var v = push(Op::Sub, node(a).len, {a, b});
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    const double* pb = val(nodes_[b.id]);
    double* out = val(n);
    for (std::size_t i = 0; i < n.len; ++i) out[i] = pa[i] - pb[i];
    return v;
}

Var Tape::mul(Var a, Var b) {
    require_same(a, b, "mul");
    Var v = push(Op::Mul, node(a).len, {a, b});
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    const double* pb = val(nodes_[b.id]);
    double* out = val(n);
    for (std::size_t i = 0; i < n.len; ++i) out[i] = pa[i] * pb[i];
    return v;
}

Var Tape::scale(Var a, double factor) {
    Var v = push(Op::Scale, node(a).len, {a}, 0, factor);
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    double* out = val(n);
    for (std::size_t i = 0; i < n.len; ++i) out[i] = factor * pa[i];
    return v;
}

Var Tape::tanh(Var a) {
    Var v = push(Op::Tanh, node(a).len, {a});
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    double* out = val(n);
    for (std::size_t i = 0; i < n.len; ++i) out[i] = std::tanh(pa[i]);
    return v;
}

Var Tape::sigmoid(Var a) {
    Var v = push(Op::Sigmoid, node(a).len, {a});
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    double* out = val(n);
    for (std::size_t i = 0; i < n.len; ++i) out[i] = narx::sigmoid(pa[i]);
    return v;
}

Var Tape::softmax(Var a) {
    Var v = push(Op::Softmax, node(a).len, {a});
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    double* out = val(n);
    const double top = *std::max_element(pa, pa + n.len);
    double total = 0.0;
    for (std::size_t i = 0; i < n.len; ++i) {
        out[i] = std::exp(pa[i] - top);
        total += out[i];
    }
    for (std::size_t i = 0; i < n.len; ++i) out[i] /= total;
    return v;
}

Var Tape::dot(Var a, Var b) {
    require_same(a, b, "dot");
    Var v = push(Op::Dot, 1, {a, b});
    const Node& n = nodes_.back();
    const double* pa = val(nodes_[a.id]);
    const double* pb = val(nodes_[b.id]);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_[a.id].len; ++i) acc += pa[i] * pb[i];
    *val(n) = acc;
    return v;
}

Var Tape::concat(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat: no operands");
    std::size_t len = 0;
    for (Var p : parts) len += node(p).len;
    Var v = push_args(Op::Concat, len, parts);
    double* out = val(nodes_.back());
    for (Var p : parts) {
        const Node& src = nodes_[p.id];
        out = std::copy(val(src), val(src) + src.len, out);
    }
    return v;
}

Var Tape::weighted_sum(Var w, std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("weighted_sum: no operands");
    if (node(w).len != parts.size()) {
        throw ShapeError("weighted_sum: " + std::to_string(node(w).len) + " weights for " +
                         std::to_string(parts.size()) + " vectors");
    }
    const std::size_t len = node(parts[0]).len;
    for (Var p : parts) {
        if (node(p).len != len) throw ShapeError("weighted_sum: vectors of unequal length");
    }
    std::vector<Var> all;
    all.reserve(parts.size() + 1);
    all.push_back(w);
    all.insert(all.end(), parts.begin(), parts.end());
    Var v = push_args(Op::WeightedSum, len, all);
    double* out = val(nodes_.back());
    const double* pw = val(nodes_[w.id]);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const double* src = val(nodes_[parts[k].id]);
        for (std::size_t i = 0; i < len; ++i) out[i] += pw[k] * src[i];
    }
    return v;
}

std::span<const double> Tape::value(Var v) const {
    const Node& n = node(v);
    return {val(n), n.len};
}

double Tape::scalar(Var v) const {
    const Node& n = node(v);
    if (n.len != 1) throw ShapeError("scalar: node has length " + std::to_string(n.len));
    return *val(n);
}

void Tape::backward(Var loss, ParameterStore& grads, double seed) {
    if (nodes_.empty()) throw StateError("backward: nothing recorded on the tape");
    if (swept_) throw StateError("backward: tape already swept; call reset() and record again");
    const Node& root = node(loss);
    if (root.len != 1) throw ShapeError("backward: loss must be scalar, got Vec(" +
                                        std::to_string(root.len) + ")");
    if (grads.size() < store_->size()) {
        throw StateError("backward: gradient store does not match the tape's parameter layout");
    }
    swept_ = true;
    grads_.assign(values_.size(), 0.0);
    grads_[root.offset] = seed;

    for (std::size_t idx = loss.id + 1; idx-- > 0;) {
        const Node& n = nodes_[idx];
        const double* g = grads_.data() + n.offset;
        const double* y = val(n);
        switch (n.op) {
            case Op::Constant:
                break;
            case Op::Param: {
                auto slot = grads.grad(n.param);
                for (std::size_t i = 0; i < n.len; ++i) slot[i] += g[i];
                break;
            }
            case Op::MatVec: {
                const Node& x = arg(n, 0);
                const auto& w = store_->entry(n.param);
                auto gw = grads.grad(n.param);
                const double* px = val(x);
                double* gx = grads_.data() + x.offset;
                for (std::size_t r = 0; r < w.rows; ++r) {
                    const double gr = g[r];
                    if (gr == 0.0) continue;
                    const double* wrow = w.value.data() + r * w.cols;
                    double* gwrow = gw.data() + r * w.cols;
                    for (std::size_t c = 0; c < w.cols; ++c) {
                        gwrow[c] += gr * px[c];
                        gx[c] += gr * wrow[c];
                    }
                }
                break;
            }
            case Op::Add:
            case Op::Sub: {
                double* ga = grads_.data() + arg(n, 0).offset;
                double* gb = grads_.data() + arg(n, 1).offset;
                const double sign = n.op == Op::Add ? 1.0 : -1.0;
                for (std::size_t i = 0; i < n.len; ++i) {
                    ga[i] += g[i];
                    gb[i] += sign * g[i];
                }
                break;
            }
            case Op::Mul: {
                const Node& a = arg(n, 0);
                const Node& b = arg(n, 1);
                const double* pa = val(a);
                const double* pb = val(b);
                double* ga = grads_.data() + a.offset;
                double* gb = grads_.data() + b.offset;
                for (std::size_t i = 0; i < n.len; ++i) {
                    ga[i] += g[i] * pb[i];
                    gb[i] += g[i] * pa[i];
                }
                break;
            }
            case Op::Scale: {
                double* ga = grads_.data() + arg(n, 0).offset;
                for (std::size_t i = 0; i < n.len; ++i) ga[i] += n.factor * g[i];
                break;
            }
            case Op::Tanh: {
                double* ga = grads_.data() + arg(n, 0).offset;
                for (std::size_t i = 0; i < n.len; ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case Op::Sigmoid: {
                double* ga = grads_.data() + arg(n, 0).offset;
                for (std::size_t i = 0; i < n.len; ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
                break;
            }
            case Op::Softmax: {
                double* ga = grads_.data() + arg(n, 0).offset;
                double gy = 0.0;
                for (std::size_t i = 0; i < n.len; ++i) gy += g[i] * y[i];
                for (std::size_t i = 0; i < n.len; ++i) ga[i] += y[i] * (g[i] - gy);
                break;
            }
            case Op::Dot: {
                const Node& a = arg(n, 0);
                const Node& b = arg(n, 1);
                const double* pa = val(a);
                const double* pb = val(b);
                double* ga = grads_.data() + a.offset;
                double* gb = grads_.data() + b.offset;
                for (std::size_t i = 0; i < a.len; ++i) {
                    ga[i] += g[0] * pb[i];
                    gb[i] += g[0] * pa[i];
                }
                break;
            }
            case Op::Concat: {
                const double* src = g;
                for (std::size_t k = 0; k < n.arg_count; ++k) {
                    const Node& part = arg(n, k);
                    double* gp = grads_.data() + part.offset;
                    for (std::size_t i = 0; i < part.len; ++i) gp[i] += src[i];
                    src += part.len;
                }
                break;
            }
            case Op::WeightedSum: {
                const Node& w = arg(n, 0);
                const double* pw = val(w);
                double* gw = grads_.data() + w.offset;
                for (std::size_t k = 1; k < n.arg_count; ++k) {
                    const Node& part = arg(n, k);
                    const double* pp = val(part);
                    double* gp = grads_.data() + part.offset;
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n.len; ++i) {
                        acc += g[i] * pp[i];
                        gp[i] += pw[k - 1] * g[i];
                    }
                    gw[k - 1] += acc;
                }
                break;
            }
        }
    }
}

}  // namespace narx
