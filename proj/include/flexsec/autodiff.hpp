#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace flexsec::ad {

using Tensor = Eigen::MatrixXd;

class Tape;

// Handle to a node recorded on a Tape.
struct Var {
    Tape* tape = nullptr;
    int id = -1;

    const Tensor& value() const;
    const Tensor& grad() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
};

// Append-only record of primitive operations. Insertion order is a
// topological order, so backward is a single reverse sweep.
class Tape {
public:
    // Receives the upstream gradient of this node and accumulates into the
    // parents through Tape::accumulate.
    using Backward = std::function<void(Tape&, const Tensor& upstream)>;

    Var leaf(Tensor value, bool requires_grad = true);
    Var constant(Tensor value) { return leaf(std::move(value), false); }

    // Records a node computed outside the built-in primitives.
    Var record(Tensor value, std::vector<int> parents, Backward backward);

    // Reverse sweep from a scalar node; seeds d(out)/d(out) = seed.
    void backward(Var out, double seed = 1.0);

    void accumulate(int id, const Tensor& g);

    const Tensor& value(int id) const;
    const Tensor& grad(int id) const;
    bool requires_grad(int id) const;
    std::size_t size() const { return nodes_.size(); }
    bool has_backward_run() const { return backward_done_; }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<int> parents;
        Backward backward;
        bool requires_grad = false;
    };

    std::vector<Node> nodes_;
    bool backward_done_ = false;

    friend struct Var;
};

// Shape errors are reported as flexsec::ShapeMismatch naming the node id.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var matmul(Var a, Var b);
Var matmul_nt(Var a, Var b);  // a * b^T, the layout used for weight matrices
Var add_row_bias(Var a, Var bias);  // bias is 1 x cols, broadcast over rows
Var reciprocal(Var a);
Var log1p(Var a);
Var exp(Var a);
Var tanh(Var a);
Var gelu(Var a);  // exact x * Phi(x)
Var sigmoid(Var a);
Var softmax_rows(Var a);
Var sum(Var a);  // scalar 1 x 1
Var mean(Var a);
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count);
Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count);

// Row r of the result is the sum of the other rows in its group of
// group_size consecutive rows: the complete-graph neighbor aggregation.
Var neighbor_sum(Var a, Eigen::Index group_size);

// Sums consecutive blocks of group_size rows; the result has
// rows / group_size rows (or n_groups zero rows when group_size is 0).
Var segment_sum(Var a, Eigen::Index group_size, Eigen::Index n_groups);

// Gathers rows by index.
Var gather_rows(Var a, const std::vector<int>& index);

// Plain-value versions used by inference paths without a tape.
double gelu_value(double x);
double gelu_derivative(double x);

struct AdamWConfig {
    double lr = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

struct AdamWState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    long step = 0;
};

// One decoupled-weight-decay Adam update over a list of parameter tensors.
void adamw_step(std::vector<Tensor*> params, const std::vector<Tensor>& grads, AdamWState& state,
                const AdamWConfig& cfg);

}  // namespace flexsec::ad
