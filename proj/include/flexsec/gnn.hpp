#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flexsec/autodiff.hpp"
#include "flexsec/channel.hpp"
#include "flexsec/secrecy.hpp"

namespace flexsec::gnn {

using ad::Tensor;

// Which eavesdropper knowledge feeds the projection y(n).
enum class EveMode { csi, distance };

const char* to_string(EveMode mode);
EveMode parse_eve_mode(const std::string& text);

struct ModelConfig {
    EveMode mode = EveMode::csi;
    int n_eves = 2;
    int proj_dim = 8;      // c; the projection emits 2c reals
    int hidden = 64;       // node embedding width of every layer
    int layers = 3;
    int head_hidden = 32;  // width of both hidden layers of f_p and f_t
    double distance_scale_m = 1000.0;
    std::uint64_t init_seed = 1;

    int eve_input_width() const { return mode == EveMode::csi ? 4 * n_eves : 2 * n_eves; }
    int projected_width() const { return 2 * proj_dim; }
    int node_input_width() const { return 4 + projected_width(); }
    static constexpr int kEdgeWidth = 16;
};

// Per-column standardization constants for the three input blocks.
struct FeatureStats {
    RVector node_mean, node_std;
    RVector edge_mean, edge_std;
    RVector eve_mean, eve_std;
};

struct NamedTensor {
    std::string name;
    Tensor value;
};

struct ModelParams {
    ModelConfig config;
    FeatureStats stats;
    std::vector<NamedTensor> tensors;  // trainable, in a fixed order

    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    std::size_t parameter_count() const;
};

// Xavier-uniform weights, zero biases, identity standardization.
ModelParams init_params(const ModelConfig& cfg);

// Input graph of one realization: one node per user pair, a complete set of
// directed edges ordered by source node then destination.
// Node n covers users a = 2n and b = 2n + 1 (0-based); with the pair's
// first user as "n" and its partner as "m":
//   node_channels(n) = [Re h_ba, Im h_ba, Re h_ab, Im h_ab]
//   eve_inputs(n)    = [Re g_b, Im g_b, Re g_a, Im g_a]  (CSI)
//                    = [d_b, d_a] / distance_scale       (distance)
//   edges(n, j)      = Re/Im of h over S = {nj, jn, mj, jm, ni, in, mi, im}
struct PairGraph {
    int n_nodes = 0;
    Tensor node_channels;  // N x 4
    Tensor eve_inputs;     // N x eve_input_width
    Tensor edges;          // N(N-1) x 16

    int n_edges() const { return n_nodes * (n_nodes - 1); }
    static int edge_index(int src, int dst, int n_nodes) { return src * (n_nodes - 1) + (dst < src ? dst : dst - 1); }
};

// Raw (unstandardized) features; channels are expressed relative to the
// noise amplitude sigma.
PairGraph raw_graph(const NetworkRealization& real, const ModelConfig& cfg);

// Standardized graph ready for the forward pass.
PairGraph build_graph(const NetworkRealization& real, const ModelParams& params);

// Standardization constants estimated from a training set.
FeatureStats compute_feature_stats(const std::vector<NetworkRealization>& data, const ModelConfig& cfg);

// Plain evaluations of the individual stages (no tape).
Tensor project_eves(const Tensor& eve_inputs, const Tensor& w_p);
RVector project_eves_csi(const CVector& g_m, const CVector& g_n, const Tensor& w_p);
RVector project_eves_distance(const RVector& d_m, const RVector& d_n, const Tensor& w_p, double distance_scale_m);
Tensor message_pass(const Tensor& x, const Tensor& edges, int n_nodes, const Tensor& w_s, const Tensor& w_i,
                    const Tensor& w_e);
double readout_power(double f_p_output, double pmax_w);
Eigen::Vector2d readout_direction(const Eigen::Vector2d& f_t_output);

// Tape handles for every trainable tensor, in ModelParams::tensors order.
struct ParamVars {
    std::vector<ad::Var> vars;
    ad::Var get(const ModelParams& params, const std::string& name) const;
};

ParamVars register_params(ad::Tape& tape, const ModelParams& params, bool requires_grad);

// Soft network outputs for a batch of graphs with a common node count.
struct SoftOutputs {
    ad::Var power;      // (B*N) x 1, in (0, pmax)
    ad::Var direction;  // (B*N) x 2, rows on the simplex
    ad::Var embedding;  // (B*N) x hidden, final layer
};

SoftOutputs forward(ad::Tape& tape, const ParamVars& vars, const ModelParams& params,
                    const std::vector<const PairGraph*>& graphs, double pmax_w);

// Hardens soft outputs of one realization into a feasible Schedule: the
// pair power goes to the argmax direction's transmitter (ties pick the
// pair's first user).
Schedule harden(const Tensor& power, const Tensor& direction, Eigen::Index row_offset, int n_pairs);

Schedule infer(const NetworkRealization& real, const ModelParams& params);

// Checkpoint: versioned header, model metadata, then named tensor records
// (name, shape, little-endian f64).
struct Checkpoint {
    ModelParams params;
    long epoch = 0;
    std::optional<ad::AdamWState> optimizer;
};

void save_params(const std::filesystem::path& path, const ModelParams& params, long epoch = 0,
                 const ad::AdamWState* optimizer = nullptr);

// With an expected config, every tensor shape and the eavesdropper mode are
// checked against it; mismatches raise ShapeMismatch naming the tensor.
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected = nullptr);
ModelParams load_params(const std::filesystem::path& path, const ModelConfig* expected = nullptr);

}  // namespace flexsec::gnn
