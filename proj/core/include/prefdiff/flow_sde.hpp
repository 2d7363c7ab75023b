#pragma once

#include <functional>
#include <vector>

#include "prefdiff/adam.hpp"
#include "prefdiff/graph.hpp"
#include "prefdiff/rng.hpp"
#include "prefdiff/tensor.hpp"

namespace prefdiff {

// Interpolant schedules for x_t = alpha(t) x1 + beta(t) z on t in [0,1],
// with alpha(0)=0, alpha(1)=1, beta(0)=1, beta(1)=0. The drift divides by
// alpha(t) and beta(t), so integration is clamped to [t_lo, t_hi].
struct InterpolantSchedule {
    std::function<double(double)> alpha;
    std::function<double(double)> beta;
    std::function<double(double)> alpha_dot;
    std::function<double(double)> beta_dot;
    std::function<double(double)> epsilon;
    double t_lo = 1e-3;
    double t_hi = 1.0 - 1e-3;
    // The noise-correction term divides the denoiser by alpha(t); setting
    // this flag switches the denominator to beta(t).
    bool score_denominator_beta = false;

    static InterpolantSchedule linear(double eps_const);
};

// eta(t, x): the learned field driving the drift. Two conventions exist for
// what it estimates; the drift formula assumes the one-step data predictor
// E[x1 | x_t = x]. See gaussian_denoiser for both closed forms.
using DenoiserField = std::function<Tensor(double, const Tensor&)>;

enum class DenoiserTarget { Data, Noise };

// b(t,x) = alpha_dot eta + (beta_dot/beta)(x - alpha eta) - (eps/alpha) eta
Tensor drift_field(double t, const Tensor& x, const DenoiserField& eta, const InterpolantSchedule& sched);

// x + b dt + sqrt(2 eps_t dt) xi
Tensor em_step(const Tensor& x, double t, double dt, const Tensor& b, double eps_t, const Tensor& xi);

// Integrates from x ~ N(0,I) at t_lo to t_hi on a uniform grid.
Tensor sde_sample(const DenoiserField& eta, const InterpolantSchedule& sched, int n_steps, int dim,
                  Rng& rng);

struct PathPoint {
    double t;
    Tensor x;
};
std::vector<PathPoint> sde_sample_path(const DenoiserField& eta, const InterpolantSchedule& sched,
                                       int n_steps, int dim, Rng& rng);

// Closed forms for rho_1 = N(0, I): E[x1|x] = alpha x / (alpha^2 + beta^2)
// and E[z|x] = beta x / (alpha^2 + beta^2).
DenoiserField gaussian_denoiser(const InterpolantSchedule& sched, DenoiserTarget target);

// Small MLP denoiser over concat(x, embedding of continuous t).
class FlowDenoiserNet {
public:
    FlowDenoiserNet() = default;
    FlowDenoiserNet(int dim, int hidden_dim, int n_hidden_layers, int time_embed_dim, Rng& rng);

    Tensor predict(double t, const Tensor& x) const;
    NodeId predict(Graph& g, const std::vector<NodeId>& param_nodes, double t, const Tensor& x) const;
    std::vector<NodeId> insert_params(Graph& g, bool track) const;

    std::vector<Tensor>& params() { return params_; }
    const std::vector<Tensor>& params() const { return params_; }
    int dim() const { return dim_; }
    DenoiserField as_field() const;

private:
    Tensor input_vector(double t, const Tensor& x) const;

    int dim_ = 0;
    int hidden_dim_ = 0;
    int n_hidden_layers_ = 0;
    int time_embed_dim_ = 0;
    std::vector<Tensor> params_;
};

// Regression eta(t, alpha x1 + beta z) onto z or x1 over t ~ U[t_lo, t_hi].
// Returns the mean loss over the last tenth of the run.
double train_denoiser(FlowDenoiserNet& net, const std::vector<Tensor>& data,
                      const InterpolantSchedule& sched, DenoiserTarget target, int steps, int batch,
                      const AdamConfig& opt, Rng& rng);

}  // namespace prefdiff
