#include <benchmark/benchmark.h>

#include "prefdiff/denoiser.hpp"
#include "prefdiff/graph.hpp"
#include "prefdiff/rng.hpp"

using namespace prefdiff;

namespace {

DenoiserNet make_net(int hidden) {
    Rng rng(1);
    DenoiserConfig cfg;
    cfg.hidden_dim = hidden;
    cfg.n_hidden_layers = 2;
    return DenoiserNet(cfg, rng);
}

void BM_DenoiserForward(benchmark::State& state) {
    const DenoiserNet net = make_net(static_cast<int>(state.range(0)));
    Rng rng(2);
    const Tensor x = rng.normal_tensor({2});
    for (auto _ : state) {
        Tensor out = net.predict(x, 500, 0);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_GraphForwardBackward(benchmark::State& state) {
    const DenoiserNet net = make_net(static_cast<int>(state.range(0)));
    Rng rng(3);
    const Tensor x = rng.normal_tensor({2});
    const Tensor eps = rng.normal_tensor({2});
    for (auto _ : state) {
        Graph g;
        const std::vector<NodeId> ids = net.insert_params(g, true);
        const NodeId pred = net.predict(g, ids, x, 500, 0);
        const NodeId loss = g.sum(g.square(g.sub(g.leaf(eps), pred)));
        g.backward(loss);
        benchmark::DoNotOptimize(g.grad(ids[0]));
    }
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_DenoiserForward)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_GraphForwardBackward)->Arg(16)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
