#pragma once

#include <vector>

#include "prefdiff/denoiser.hpp"
#include "prefdiff/graph.hpp"
#include "prefdiff/rng.hpp"
#include "prefdiff/schedule.hpp"
#include "prefdiff/tensor.hpp"

namespace prefdiff {

// Isotropic Gaussian over sample space.
struct GaussianParams {
    Tensor mean;
    double var = 1.0;
};

// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps
Tensor forward_diffuse(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& sched);

// q(x_{t-1} | x_t, x0). Defined for 1 <= t <= T with abar_0 := 1; the t=1
// variance is floored at kPosteriorVarFloor to keep log-densities finite.
GaussianParams posterior_params(const Tensor& x0, const Tensor& x_t, int t, const NoiseSchedule& sched);

inline constexpr double kPosteriorVarFloor = 1e-12;
double posterior_variance(int t, const NoiseSchedule& sched);

// p_theta(x_{t-1} | x_t) with the variance fixed to the forward posterior's.
GaussianParams model_reverse_params(const DenoiserNet& net, const Tensor& x_t, int t, int c,
                                    const NoiseSchedule& sched);

// Tape variant: returns the mean node; variance is the same fixed scalar.
NodeId model_reverse_mean(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                          const Tensor& x_t, int t, int c, const NoiseSchedule& sched);

double gaussian_log_density(const Tensor& x, const GaussianParams& p);
NodeId gaussian_log_density(Graph& g, const Tensor& x, NodeId mean, double var);

// Ancestral sampler; the final t=1 step is noiseless.
Tensor ddpm_sample(const DenoiserNet& net, int c, const NoiseSchedule& sched, Rng& rng);

// Mean over the batch of |eps - eps_theta(x_t, t, c)|^2 with t ~ U{1..T}.
NodeId pretrain_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                     const std::vector<Tensor>& x0_batch, const std::vector<int>& c_batch,
                     const NoiseSchedule& sched, Rng& rng);
double pretrain_loss_value(const DenoiserNet& net, const std::vector<Tensor>& x0_batch,
                           const std::vector<int>& c_batch, const NoiseSchedule& sched, Rng& rng);

}  // namespace prefdiff
