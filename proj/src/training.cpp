#include "flexsec/training.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "flexsec/errors.hpp"
#include "flexsec/secrecy.hpp"

namespace flexsec::training {

namespace {

constexpr std::uint64_t kTrainSalt = 0x7472616eull;
constexpr std::uint64_t kValSalt = 0x76616cull;
constexpr std::uint64_t kShuffleSalt = 0x73687566ull;

}  // namespace

void TrainConfig::validate() const {
    if (n_train < 1 || batch_size < 1 || epochs < 1 || early_stop_patience < 1 || n_val < 1) {
        throw ConfigError("training counts must be positive");
    }
    if (batch_size > n_train) throw ConfigError("batch_size must not exceed n_train");
    if (!(lr > 0.0) || !(weight_decay >= 0.0)) throw ConfigError("lr must be > 0 and weight_decay >= 0");
}

PairGradient relaxed_pair_gradient(const NetworkRealization& real, const Eigen::Ref<const RVector>& power,
                                   const Eigen::Ref<const Eigen::MatrixX2d>& direction) {
    const int pairs = real.n_pairs();
    RVector t(2 * pairs), p(2 * pairs);
    for (int q = 0; q < pairs; ++q) {
        t[2 * q] = direction(q, 0);
        t[2 * q + 1] = direction(q, 1);
        p[2 * q] = power[q];
        p[2 * q + 1] = power[q];
    }
    const auto obj = relaxed_sum_secrecy_grad(real, t, p);
    PairGradient out;
    out.value = obj.value;
    out.d_power.resize(pairs);
    out.d_dir.resize(pairs, 2);
    for (int q = 0; q < pairs; ++q) {
        out.d_power[q] = obj.d_p[2 * q] + obj.d_p[2 * q + 1];
        out.d_dir(q, 0) = obj.d_t[2 * q];
        out.d_dir(q, 1) = obj.d_t[2 * q + 1];
    }
    return out;
}

ad::Var loss(ad::Tape& tape, const gnn::SoftOutputs& outputs, const std::vector<const NetworkRealization*>& batch,
             Exec exec) {
    if (batch.empty()) throw EmptyDataset("loss over an empty batch");
    const ad::Tensor& power = outputs.power.value();
    const ad::Tensor& dir = outputs.direction.value();
    const int pairs = batch.front()->n_pairs();
    const int count = static_cast<int>(batch.size());
    if (power.rows() != static_cast<Eigen::Index>(count) * pairs || power.cols() != 1 || dir.rows() != power.rows() ||
        dir.cols() != 2) {
        throw ShapeMismatch("loss: soft outputs do not match the batch layout");
    }

    std::vector<PairGradient> parts(static_cast<std::size_t>(count));
    parallel_for(count, exec, [&](int b) {
        if (batch[static_cast<std::size_t>(b)]->n_pairs() != pairs) {
            throw ShapeMismatch("loss: realizations in a batch must share the pair count");
        }
        const RVector pw = power.col(0).segment(static_cast<Eigen::Index>(b) * pairs, pairs);
        const Eigen::MatrixX2d dr = dir.middleRows(static_cast<Eigen::Index>(b) * pairs, pairs);
        parts[static_cast<std::size_t>(b)] = relaxed_pair_gradient(*batch[static_cast<std::size_t>(b)], pw, dr);
    });

    // Index-ordered reduction keeps serial and parallel results identical.
    double total = 0.0;
    ad::Tensor d_power(power.rows(), 1), d_dir(dir.rows(), 2);
    const double inv = 1.0 / static_cast<double>(count);
    for (int b = 0; b < count; ++b) {
        const auto& part = parts[static_cast<std::size_t>(b)];
        total += part.value;
        d_power.middleRows(static_cast<Eigen::Index>(b) * pairs, pairs) = -inv * part.d_power;
        d_dir.middleRows(static_cast<Eigen::Index>(b) * pairs, pairs) = -inv * part.d_dir;
    }
    ad::Tensor value(1, 1);
    value(0, 0) = -total * inv;
    const int ip = outputs.power.id, id = outputs.direction.id;
    return tape.record(std::move(value), {ip, id},
                       [ip, id, d_power = std::move(d_power), d_dir = std::move(d_dir)](ad::Tape& tp,
                                                                                       const ad::Tensor& g) {
                           tp.accumulate(ip, g(0, 0) * d_power);
                           tp.accumulate(id, g(0, 0) * d_dir);
                       });
}

BatchGradient batch_gradient(const gnn::ModelParams& params, const std::vector<const gnn::PairGraph*>& graphs,
                             const std::vector<const NetworkRealization*>& batch, Exec exec) {
    ad::Tape tape;
    const auto vars = gnn::register_params(tape, params, true);
    const auto out = gnn::forward(tape, vars, params, graphs, batch.front()->pmax_w);
    const auto l = loss(tape, out, batch, exec);
    tape.backward(l);
    BatchGradient bg;
    bg.loss = l.value()(0, 0);
    bg.grads.reserve(vars.vars.size());
    for (const auto& v : vars.vars) bg.grads.push_back(v.grad());
    return bg;
}

double evaluate_assr(const gnn::ModelParams& params, const std::vector<NetworkRealization>& data, Exec exec) {
    if (data.empty()) throw EmptyDataset("ASSR over an empty dataset");
    std::vector<double> rates(data.size());
    parallel_for(static_cast<int>(data.size()), exec, [&](int i) {
        const auto& real = data[static_cast<std::size_t>(i)];
        rates[static_cast<std::size_t>(i)] = sum_secrecy(real, gnn::infer(real, params));
    });
    return std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
}

std::vector<NetworkRealization> training_set(const TrainConfig& cfg, const SimConfig& sim) {
    SimConfig s = sim;
    s.seed = mix_seed(cfg.seed, kTrainSalt);
    return generate_batch(s, cfg.n_train, cfg.exec);
}

std::vector<NetworkRealization> validation_set(const TrainConfig& cfg, const SimConfig& sim) {
    SimConfig s = sim;
    s.seed = mix_seed(cfg.seed, kValSalt);
    return generate_batch(s, cfg.n_val, cfg.exec);
}

TrainResult train(const TrainConfig& cfg, const SimConfig& sim, const gnn::ModelConfig& model,
                  const std::optional<ResumeState>& resume, const EpochCallback& on_epoch) {
    cfg.validate();
    sim.validate();
    if (model.n_eves != sim.n_eves) throw ConfigError("model and simulation disagree on the eavesdropper count");

    const auto train_data = training_set(cfg, sim);
    const auto val_data = validation_set(cfg, sim);

    TrainResult result;
    gnn::ModelParams params;
    long first_epoch = 1;
    if (resume) {
        params = resume->params;
        if (resume->optimizer) result.optimizer = *resume->optimizer;
        first_epoch = resume->epoch + 1;
    } else {
        params = gnn::init_params(model);
        params.stats = gnn::compute_feature_stats(train_data, model);
    }

    std::vector<gnn::PairGraph> graphs(train_data.size());
    parallel_for(static_cast<int>(train_data.size()), cfg.exec, [&](int i) {
        graphs[static_cast<std::size_t>(i)] = gnn::build_graph(train_data[static_cast<std::size_t>(i)], params);
    });

    const ad::AdamWConfig opt{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay};
    std::vector<int> order(train_data.size());

    double best_assr = -1.0;
    result.best = params;
    result.best_epoch = first_epoch - 1;
    int since_best = 0;

    for (long epoch = first_epoch; epoch < first_epoch + cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        // Batching depends only on (seed, epoch) so a resumed run replays it exactly.
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle(mix_seed(cfg.seed, kShuffleSalt + static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), shuffle);

        double loss_sum = 0.0;
        int batches = 0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t b1 = std::min(order.size(), b0 + static_cast<std::size_t>(cfg.batch_size));
            std::vector<const gnn::PairGraph*> g;
            std::vector<const NetworkRealization*> r;
            for (std::size_t i = b0; i < b1; ++i) {
                g.push_back(&graphs[static_cast<std::size_t>(order[i])]);
                r.push_back(&train_data[static_cast<std::size_t>(order[i])]);
            }
            auto bg = batch_gradient(params, g, r, cfg.exec);
            std::vector<ad::Tensor*> ptrs;
            for (auto& t : params.tensors) ptrs.push_back(&t.value);
            ad::adamw_step(ptrs, bg.grads, result.optimizer, opt);
            loss_sum += bg.loss;
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / batches;
        rec.val_assr_nats = evaluate_assr(params, val_data, cfg.exec);
        rec.val_assr_bits = nats_to_bits(rec.val_assr_nats);
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.push_back(rec);
        result.last_epoch = epoch;
        if (on_epoch) on_epoch(rec);

        if (rec.val_assr_nats > best_assr) {
            best_assr = rec.val_assr_nats;
            result.best = params;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.early_stop_patience) {
            result.early_stopped = true;
            break;
        }
    }
    result.last = std::move(params);
    return result;
}

}  // namespace flexsec::training
