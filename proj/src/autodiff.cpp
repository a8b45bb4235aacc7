#include "flexsec/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "flexsec/errors.hpp"

namespace flexsec::ad {

namespace {

[[noreturn]] void shape_fail(const Tape& tape, const char* op, const Tensor& a, const Tensor& b) {
    std::ostringstream msg;
    msg << op << ": shape mismatch at node " << tape.size() << " (" << a.rows() << "x" << a.cols() << " vs "
        << b.rows() << "x" << b.cols() << ")";
    throw ShapeMismatch(msg.str());
}

Tape& same_tape(Var a, Var b) {
    if (a.tape == nullptr || a.tape != b.tape) throw Error("operands recorded on different tapes");
    return *a.tape;
}

Tape& tape_of(Var a) {
    if (a.tape == nullptr) throw Error("variable is not attached to a tape");
    return *a.tape;
}

template <typename F>
Var unary(Var a, Tensor value, F local_grad) {
    Tape& t = tape_of(a);
    const int ia = a.id;
    return t.record(std::move(value), {ia}, [ia, local_grad](Tape& tp, const Tensor& g) {
        tp.accumulate(ia, local_grad(tp, g));
    });
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

const Tensor& Var::value() const { return tape_of(*this).value(id); }
const Tensor& Var::grad() const { return tape_of(*this).grad(id); }

Var Tape::leaf(Tensor value, bool requires_grad) {
    Node node;
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    nodes_.push_back(std::move(node));
    return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::record(Tensor value, std::vector<int> parents, Backward backward) {
    Node node;
    node.value = std::move(value);
    for (int p : parents) {
        if (p < 0 || p >= static_cast<int>(nodes_.size())) throw Error("parent id out of range");
        node.requires_grad = node.requires_grad || nodes_[static_cast<std::size_t>(p)].requires_grad;
    }
    node.parents = std::move(parents);
    if (node.requires_grad) node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    return {this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(Var out, double seed) {
    if (out.tape != this || out.id < 0 || out.id >= static_cast<int>(nodes_.size())) {
        throw Error("backward called before forward: output node is not on this tape");
    }
    const auto& root = nodes_[static_cast<std::size_t>(out.id)];
    if (root.value.size() != 1) throw ShapeMismatch("backward expects a scalar output node");

    for (auto& node : nodes_) {
        if (node.requires_grad) node.grad = Tensor::Zero(node.value.rows(), node.value.cols());
    }
    if (!root.requires_grad) {
        backward_done_ = true;
        return;
    }
    nodes_[static_cast<std::size_t>(out.id)].grad(0, 0) = seed;
    for (int i = out.id; i >= 0; --i) {
        auto& node = nodes_[static_cast<std::size_t>(i)];
        if (!node.requires_grad || !node.backward) continue;
        // Callbacks only touch grads of earlier nodes, never this one.
        node.backward(*this, node.grad);
    }
    backward_done_ = true;
}

void Tape::accumulate(int id, const Tensor& g) {
    auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.requires_grad) return;
    if (node.grad.rows() != g.rows() || node.grad.cols() != g.cols()) {
        shape_fail(*this, "accumulate", node.grad, g);
    }
    node.grad += g;
}

const Tensor& Tape::value(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) throw Error("node id out of range");
    return nodes_[static_cast<std::size_t>(id)].value;
}

const Tensor& Tape::grad(int id) const {
    if (!backward_done_) throw Error("gradient requested before backward");
    if (id < 0 || id >= static_cast<int>(nodes_.size())) throw Error("node id out of range");
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.requires_grad) throw Error("node " + std::to_string(id) + " does not require a gradient");
    return node.grad;
}

bool Tape::requires_grad(int id) const { return nodes_.at(static_cast<std::size_t>(id)).requires_grad; }

Var add(Var a, Var b) {
    Tape& t = same_tape(a, b);
    const Tensor& va = a.value();
    const Tensor& vb = b.value();
    if (va.rows() != vb.rows() || va.cols() != vb.cols()) shape_fail(t, "add", va, vb);
    const int ia = a.id, ib = b.id;
    return t.record(va + vb, {ia, ib}, [ia, ib](Tape& tp, const Tensor& g) {
        tp.accumulate(ia, g);
        tp.accumulate(ib, g);
    });
}

Var sub(Var a, Var b) {
    Tape& t = same_tape(a, b);
    const Tensor& va = a.value();
    const Tensor& vb = b.value();
    if (va.rows() != vb.rows() || va.cols() != vb.cols()) shape_fail(t, "sub", va, vb);
    const int ia = a.id, ib = b.id;
    return t.record(va - vb, {ia, ib}, [ia, ib](Tape& tp, const Tensor& g) {
        tp.accumulate(ia, g);
        tp.accumulate(ib, -g);
    });
}

Var mul(Var a, Var b) {
    Tape& t = same_tape(a, b);
    const Tensor& va = a.value();
    const Tensor& vb = b.value();
    if (va.rows() != vb.rows() || va.cols() != vb.cols()) shape_fail(t, "mul", va, vb);
    const int ia = a.id, ib = b.id;
    return t.record(va.cwiseProduct(vb), {ia, ib}, [ia, ib](Tape& tp, const Tensor& g) {
        tp.accumulate(ia, g.cwiseProduct(tp.value(ib)));
        tp.accumulate(ib, g.cwiseProduct(tp.value(ia)));
    });
}

Var scale(Var a, double s) {
    return unary(a, a.value() * s, [s](Tape&, const Tensor& g) { return Tensor(g * s); });
}

Var add_scalar(Var a, double s) {
    return unary(a, (a.value().array() + s).matrix(), [](Tape&, const Tensor& g) { return g; });
}

Var matmul(Var a, Var b) {
    Tape& t = same_tape(a, b);
    const Tensor& va = a.value();
    const Tensor& vb = b.value();
    if (va.cols() != vb.rows()) shape_fail(t, "matmul", va, vb);
    const int ia = a.id, ib = b.id;
    return t.record(va * vb, {ia, ib}, [ia, ib](Tape& tp, const Tensor& g) {
        if (tp.requires_grad(ia)) tp.accumulate(ia, g * tp.value(ib).transpose());
        if (tp.requires_grad(ib)) tp.accumulate(ib, tp.value(ia).transpose() * g);
    });
}

Var matmul_nt(Var a, Var b) {
    Tape& t = same_tape(a, b);
    const Tensor& va = a.value();
    const Tensor& vb = b.value();
    if (va.cols() != vb.cols()) shape_fail(t, "matmul_nt", va, vb);
    const int ia = a.id, ib = b.id;
    return t.record(va * vb.transpose(), {ia, ib}, [ia, ib](Tape& tp, const Tensor& g) {
        if (tp.requires_grad(ia)) tp.accumulate(ia, g * tp.value(ib));
        if (tp.requires_grad(ib)) tp.accumulate(ib, g.transpose() * tp.value(ia));
    });
}

Var add_row_bias(Var a, Var bias) {
    Tape& t = same_tape(a, bias);
    const Tensor& va = a.value();
    const Tensor& vb = bias.value();
    if (vb.rows() != 1 || vb.cols() != va.cols()) shape_fail(t, "add_row_bias", va, vb);
    const int ia = a.id, ib = bias.id;
    Tensor out = va.rowwise() + vb.row(0);
    return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, const Tensor& g) {
        tp.accumulate(ia, g);
        tp.accumulate(ib, g.colwise().sum());
    });
}

Var reciprocal(Var a) {
    Tensor out = a.value().cwiseInverse();
    return unary(a, out, [out](Tape&, const Tensor& g) {
        return Tensor(-g.cwiseProduct(out.cwiseProduct(out)));
    });
}

Var log1p(Var a) {
    const Tensor& va = a.value();
    Tensor out = va.unaryExpr([](double x) { return std::log1p(x); });
    const int ia = a.id;
    return unary(a, std::move(out), [ia](Tape& tp, const Tensor& g) {
        return Tensor(g.cwiseQuotient((tp.value(ia).array() + 1.0).matrix()));
    });
}

Var exp(Var a) {
    Tensor out = a.value().array().exp().matrix();
    return unary(a, out, [out](Tape&, const Tensor& g) { return Tensor(g.cwiseProduct(out)); });
}

Var tanh(Var a) {
    Tensor out = a.value().array().tanh().matrix();
    return unary(a, out, [out](Tape&, const Tensor& g) {
        return Tensor(g.array() * (1.0 - out.array().square()));
    });
}

double gelu_value(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_derivative(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return cdf + x * pdf;
}

Var gelu(Var a) {
    const Tensor& va = a.value();
    Tensor out = va.unaryExpr([](double x) { return gelu_value(x); });
    const int ia = a.id;
    return unary(a, std::move(out), [ia](Tape& tp, const Tensor& g) {
        return Tensor(g.cwiseProduct(tp.value(ia).unaryExpr([](double x) { return gelu_derivative(x); })));
    });
}

Var sigmoid(Var a) {
    Tensor out = a.value().unaryExpr([](double x) {
        // Split on sign so exp never overflows.
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
    });
    return unary(a, out, [out](Tape&, const Tensor& g) {
        return Tensor(g.array() * out.array() * (1.0 - out.array()));
    });
}

Var softmax_rows(Var a) {
    const Tensor& va = a.value();
    Tensor out(va.rows(), va.cols());
    for (Eigen::Index r = 0; r < va.rows(); ++r) {
        const double shift = va.row(r).maxCoeff();
        out.row(r) = (va.row(r).array() - shift).exp().matrix();
        out.row(r) /= out.row(r).sum();
    }
    return unary(a, out, [out](Tape&, const Tensor& g) {
        Tensor gin(out.rows(), out.cols());
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            const double dot = g.row(r).dot(out.row(r));
            gin.row(r) = out.row(r).cwiseProduct((g.row(r).array() - dot).matrix());
        }
        return gin;
    });
}

Var sum(Var a) {
    Tensor out(1, 1);
    out(0, 0) = a.value().sum();
    const auto rows = a.rows(), cols = a.cols();
    return unary(a, std::move(out), [rows, cols](Tape&, const Tensor& g) {
        return Tensor(Tensor::Constant(rows, cols, g(0, 0)));
    });
}

Var mean(Var a) {
    const auto n = static_cast<double>(a.value().size());
    if (n == 0) throw ShapeMismatch("mean of an empty tensor");
    return scale(sum(a), 1.0 / n);
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_cols of nothing");
    Tape& t = tape_of(parts.front());
    const auto rows = parts.front().rows();
    Eigen::Index cols = 0;
    std::vector<int> ids;
    std::vector<Eigen::Index> widths;
    for (const auto& p : parts) {
        if (p.tape != &t) throw Error("operands recorded on different tapes");
        if (p.rows() != rows) shape_fail(t, "concat_cols", parts.front().value(), p.value());
        ids.push_back(p.id);
        widths.push_back(p.cols());
        cols += p.cols();
    }
    Tensor out(rows, cols);
    Eigen::Index offset = 0;
    for (const auto& p : parts) {
        out.middleCols(offset, p.cols()) = p.value();
        offset += p.cols();
    }
    return t.record(std::move(out), ids, [ids, widths](Tape& tp, const Tensor& g) {
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            tp.accumulate(ids[i], g.middleCols(off, widths[i]));
            off += widths[i];
        }
    });
}

Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count) {
    const Tensor& va = a.value();
    if (begin < 0 || count < 0 || begin + count > va.cols()) {
        throw ShapeMismatch("slice_cols out of range at node " + std::to_string(tape_of(a).size()));
    }
    const auto rows = va.rows(), cols = va.cols();
    return unary(a, va.middleCols(begin, count), [=](Tape&, const Tensor& g) {
        Tensor gin = Tensor::Zero(rows, cols);
        gin.middleCols(begin, count) = g;
        return gin;
    });
}

Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count) {
    const Tensor& va = a.value();
    if (begin < 0 || count < 0 || begin + count > va.rows()) {
        throw ShapeMismatch("slice_rows out of range at node " + std::to_string(tape_of(a).size()));
    }
    const auto rows = va.rows(), cols = va.cols();
    return unary(a, va.middleRows(begin, count), [=](Tape&, const Tensor& g) {
        Tensor gin = Tensor::Zero(rows, cols);
        gin.middleRows(begin, count) = g;
        return gin;
    });
}

Var neighbor_sum(Var a, Eigen::Index group_size) {
    const Tensor& va = a.value();
    if (group_size <= 0 || va.rows() % group_size != 0) {
        throw ShapeMismatch("neighbor_sum: rows not divisible by group size at node " +
                            std::to_string(tape_of(a).size()));
    }
    // out_r = sum_{s in group, s != r} a_s is linear and symmetric, so the
    // adjoint has the same form.
    auto apply = [group_size](const Tensor& x) {
        Tensor out(x.rows(), x.cols());
        for (Eigen::Index g0 = 0; g0 < x.rows(); g0 += group_size) {
            const Eigen::RowVectorXd total = x.middleRows(g0, group_size).colwise().sum();
            for (Eigen::Index r = g0; r < g0 + group_size; ++r) out.row(r) = total - x.row(r);
        }
        return out;
    };
    return unary(a, apply(va), [apply](Tape&, const Tensor& g) { return apply(g); });
}

Var segment_sum(Var a, Eigen::Index group_size, Eigen::Index n_groups) {
    const Tensor& va = a.value();
    if (group_size < 0 || va.rows() != group_size * n_groups) {
        throw ShapeMismatch("segment_sum: expected " + std::to_string(group_size * n_groups) + " rows at node " +
                            std::to_string(tape_of(a).size()));
    }
    const auto cols = va.cols();
    Tensor out = Tensor::Zero(n_groups, cols);
    for (Eigen::Index g0 = 0; g0 < n_groups; ++g0) {
        if (group_size > 0) out.row(g0) = va.middleRows(g0 * group_size, group_size).colwise().sum();
    }
    return unary(a, std::move(out), [group_size, n_groups, cols](Tape&, const Tensor& g) {
        Tensor gin(group_size * n_groups, cols);
        for (Eigen::Index g0 = 0; g0 < n_groups; ++g0)
            for (Eigen::Index r = 0; r < group_size; ++r) gin.row(g0 * group_size + r) = g.row(g0);
        return gin;
    });
}

Var gather_rows(Var a, const std::vector<int>& index) {
    const Tensor& va = a.value();
    Tensor out(static_cast<Eigen::Index>(index.size()), va.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] < 0 || index[i] >= va.rows()) {
            throw ShapeMismatch("gather_rows index out of range at node " + std::to_string(tape_of(a).size()));
        }
        out.row(static_cast<Eigen::Index>(i)) = va.row(index[i]);
    }
    const auto rows = va.rows(), cols = va.cols();
    return unary(a, std::move(out), [index, rows, cols](Tape&, const Tensor& g) {
        Tensor gin = Tensor::Zero(rows, cols);
        for (std::size_t i = 0; i < index.size(); ++i) gin.row(index[i]) += g.row(static_cast<Eigen::Index>(i));
        return gin;
    });
}

void adamw_step(std::vector<Tensor*> params, const std::vector<Tensor>& grads, AdamWState& state,
                const AdamWConfig& cfg) {
    if (params.size() != grads.size()) throw ShapeMismatch("adamw_step: parameter/gradient count differs");
    if (state.m.empty()) {
        for (const auto* p : params) {
            state.m.push_back(Tensor::Zero(p->rows(), p->cols()));
            state.v.push_back(Tensor::Zero(p->rows(), p->cols()));
        }
    }
    if (state.m.size() != params.size()) throw ShapeMismatch("adamw_step: optimizer state does not match parameters");
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = grads[i];
        if (g.rows() != p.rows() || g.cols() != p.cols() || state.m[i].rows() != p.rows() ||
            state.m[i].cols() != p.cols()) {
            throw ShapeMismatch("adamw_step: shape mismatch for parameter " + std::to_string(i));
        }
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
        p *= 1.0 - cfg.lr * cfg.weight_decay;
        p.array() -= cfg.lr * (state.m[i].array() / c1) / ((state.v[i].array() / c2).sqrt() + cfg.eps);
    }
}

}  // namespace flexsec::ad
