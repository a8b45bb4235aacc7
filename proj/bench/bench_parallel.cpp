// Serial reference vs OpenMP kernels. The Exec argument selects the path;
// both produce identical results, so only wall time differs.

#include <benchmark/benchmark.h>

#include "flexsec/channel.hpp"
#include "flexsec/training.hpp"

using namespace flexsec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

SimConfig sim(int pairs) {
    SimConfig cfg;
    cfg.n_pairs = pairs;
    cfg.n_eves = 2;
    return cfg;
}

void BM_GenerateBatch(benchmark::State& state) {
    const auto cfg = sim(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(generate_batch(cfg, 256, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * 256);
}

struct BatchFixture {
    gnn::ModelParams params;
    std::vector<NetworkRealization> data;
    std::vector<gnn::PairGraph> graphs;
    std::vector<const gnn::PairGraph*> g;
    std::vector<const NetworkRealization*> r;

    explicit BatchFixture(int pairs) {
        gnn::ModelConfig model;
        params = gnn::init_params(model);
        data = generate_batch(sim(pairs), 128, Exec::serial);
        params.stats = gnn::compute_feature_stats(data, model);
        for (const auto& d : data) graphs.push_back(gnn::build_graph(d, params));
        for (std::size_t i = 0; i < data.size(); ++i) {
            g.push_back(&graphs[i]);
            r.push_back(&data[i]);
        }
    }
};

void BM_BatchGradient(benchmark::State& state) {
    const BatchFixture f(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(training::batch_gradient(f.params, f.g, f.r, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * 128);
}

void BM_EvaluateAssr(benchmark::State& state) {
    const BatchFixture f(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(training::evaluate_assr(f.params, f.data, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * 128);
}

// Args: {0 = serial, 1 = OpenMP}, N pairs.
void exec_args(benchmark::internal::Benchmark* b) {
    b->ArgNames({"omp", "N"});
    for (int n : {2, 8})
        for (int e : {0, 1}) b->Args({e, n});
    b->Unit(benchmark::kMillisecond);
    b->UseRealTime();
}

}  // namespace

BENCHMARK(BM_GenerateBatch)->Apply(exec_args);
BENCHMARK(BM_BatchGradient)->Apply(exec_args);
BENCHMARK(BM_EvaluateAssr)->Apply(exec_args);

BENCHMARK_MAIN();
