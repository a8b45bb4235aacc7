#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "flexsec/autodiff.hpp"
#include "flexsec/channel.hpp"
#include "flexsec/gnn.hpp"
#include "flexsec/parallel.hpp"

namespace flexsec::training {

struct TrainConfig {
    int n_train = 10000;
    int batch_size = 128;
    double lr = 0.002;
    double weight_decay = 0.01;
    int epochs = 100;
    int early_stop_patience = 10;
    std::uint64_t seed = 1;
    int n_val = 1000;
    Exec exec = Exec::parallel;

    void validate() const;
};

struct EpochRecord {
    long epoch = 0;
    double train_loss = 0.0;
    double val_assr_nats = 0.0;
    double val_assr_bits = 0.0;
    double wall_seconds = 0.0;
};

struct TrainResult {
    gnn::ModelParams best;  // best validation ASSR seen
    gnn::ModelParams last;
    ad::AdamWState optimizer;  // state after the last epoch
    std::vector<EpochRecord> history;
    long best_epoch = 0;
    long last_epoch = 0;
    bool early_stopped = false;
};

// Mean over the batch of the negative relaxed sum secrecy rate. The soft
// outputs hold one row per user pair, realizations stacked in batch order;
// pair p's power drives both of its users, gated by the two softmax
// components (first component = the pair's first user transmits).
ad::Var loss(ad::Tape& tape, const gnn::SoftOutputs& outputs, const std::vector<const NetworkRealization*>& batch,
             Exec exec = Exec::parallel);

// Per-realization relaxed objective value and its gradient w.r.t. the pair
// powers and pair directions; the kernel the loss distributes.
struct PairGradient {
    double value = 0.0;
    RVector d_power;         // n_pairs
    Eigen::MatrixX2d d_dir;  // n_pairs x 2
};
PairGradient relaxed_pair_gradient(const NetworkRealization& real, const Eigen::Ref<const RVector>& power,
                                   const Eigen::Ref<const Eigen::MatrixX2d>& direction);

// Loss and parameter gradients of one batch.
struct BatchGradient {
    double loss = 0.0;
    std::vector<ad::Tensor> grads;  // ModelParams::tensors order
};
BatchGradient batch_gradient(const gnn::ModelParams& params, const std::vector<const gnn::PairGraph*>& graphs,
                             const std::vector<const NetworkRealization*>& batch, Exec exec = Exec::parallel);

// Mean clamped sum secrecy of hardened inference over a dataset.
double evaluate_assr(const gnn::ModelParams& params, const std::vector<NetworkRealization>& data,
                     Exec exec = Exec::parallel);

using EpochCallback = std::function<void(const EpochRecord&)>;

// Starting point for resumed training.
struct ResumeState {
    gnn::ModelParams params;
    std::optional<ad::AdamWState> optimizer;
    long epoch = 0;
};

TrainResult train(const TrainConfig& cfg, const SimConfig& sim, const gnn::ModelConfig& model,
                  const std::optional<ResumeState>& resume = std::nullopt, const EpochCallback& on_epoch = {});

// Training and validation sets: independent seeds derived from the training seed.
std::vector<NetworkRealization> training_set(const TrainConfig& cfg, const SimConfig& sim);
std::vector<NetworkRealization> validation_set(const TrainConfig& cfg, const SimConfig& sim);

}  // namespace flexsec::training
