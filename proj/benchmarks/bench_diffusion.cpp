#include <benchmark/benchmark.h>

#include "prefdiff/diffusion.hpp"
#include "prefdiff/flow_sde.hpp"
#include "prefdiff/weights.hpp"

using namespace prefdiff;

namespace {

void BM_DdpmSample(benchmark::State& state) {
    const NoiseSchedule sched = NoiseSchedule::linear(static_cast<int>(state.range(0)), 1e-4, 0.02);
    Rng init(1);
    DenoiserConfig cfg;
    cfg.hidden_dim = 32;
    const DenoiserNet net(cfg, init);
    Rng rng(2);
    for (auto _ : state) {
        Tensor x = ddpm_sample(net, 0, sched, rng);
        benchmark::DoNotOptimize(x);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ImportanceWeight(benchmark::State& state) {
    const NoiseSchedule sched = NoiseSchedule::linear(1000, 1e-4, 0.02);
    Rng init(1);
    DenoiserConfig cfg;
    cfg.hidden_dim = 32;
    const DenoiserNet net(cfg, init);
    Rng rng(3);
    const Tensor x0 = rng.normal_tensor({2});
    const Tensor eps = rng.normal_tensor({2});
    const Tensor x_t = forward_diffuse(x0, 500, eps, sched);
    const ClipConfig clip;
    for (auto _ : state) {
        StepWeight w = importance_weight(net, x0, x_t, 500, 0, sched, rng, clip);
        benchmark::DoNotOptimize(w);
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_SdeSample(benchmark::State& state) {
    const InterpolantSchedule sched = InterpolantSchedule::linear(0.1);
    const DenoiserField field = gaussian_denoiser(sched, DenoiserTarget::Data);
    Rng rng(4);
    const int steps = static_cast<int>(state.range(0));
    for (auto _ : state) {
        Tensor x = sde_sample(field, sched, steps, 2, rng);
        benchmark::DoNotOptimize(x);
    }
    state.SetItemsProcessed(state.iterations() * steps);
}

}  // namespace

BENCHMARK(BM_DdpmSample)->Arg(100)->Arg(1000);
BENCHMARK(BM_ImportanceWeight);
BENCHMARK(BM_SdeSample)->Arg(100)->Arg(400);
