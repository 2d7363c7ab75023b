#include <benchmark/benchmark.h>

#include "prefdiff/losses.hpp"

using namespace prefdiff;

namespace {

struct LossFixture {
    NoiseSchedule sched = NoiseSchedule::linear(1000, 1e-4, 0.02);
    DenoiserNet net;
    DenoiserNet ref;
    PrefBatchStep batch;
    StepWeight ww, wl;
    PairEvalPoints points;

    LossFixture() {
        Rng rng(1);
        DenoiserConfig cfg;
        cfg.hidden_dim = 32;
        net = DenoiserNet(cfg, rng);
        ref = DenoiserNet(cfg, rng);
        Rng data(2);
        batch = PrefBatchStep::make(0, 500, data.normal_tensor({2}), data.normal_tensor({2}),
                                    data.normal_tensor({2}), data.normal_tensor({2}), sched);
        const ClipConfig clip;
        Rng w_rng(3);
        ww = importance_weight(net, batch.x0_w, batch.x_t_w, 500, 0, sched, w_rng, clip);
        wl = importance_weight(net, batch.x0_l, batch.x_t_l, 500, 0, sched, w_rng, clip);
        Rng p_rng(4);
        points = draw_eval_points(batch, sched, p_rng);
    }
};

void BM_DiffusionDpoStep(benchmark::State& state) {
    const LossFixture f;
    LossConfig cfg;
    cfg.beta = 2.0;
    for (auto _ : state) {
        Graph g;
        const std::vector<NodeId> ids = f.net.insert_params(g, true);
        const NodeId loss = diffusion_dpo_loss(g, ids, f.net, f.ref, f.batch, f.sched, cfg);
        g.backward(loss);
        benchmark::DoNotOptimize(g.grad(ids[0]));
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_SdpoStep(benchmark::State& state) {
    const LossFixture f;
    LossConfig cfg;
    cfg.beta = 0.02;
    for (auto _ : state) {
        Graph g;
        const std::vector<NodeId> ids = f.net.insert_params(g, true);
        const NodeId loss =
            sdpo_diffusion_loss(g, ids, f.net, f.ref, f.batch, f.sched, cfg, f.ww, f.wl, f.points);
        g.backward(loss);
        benchmark::DoNotOptimize(g.grad(ids[0]));
    }
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_DiffusionDpoStep);
BENCHMARK(BM_SdpoStep);
