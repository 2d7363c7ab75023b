#include "prefdiff/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace prefdiff {

Tensor forward_diffuse(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& sched) {
    if (!x0.same_shape(eps))
        throw std::invalid_argument("forward_diffuse: x0 and eps shapes differ");
    const double ab = sched.alpha_bar_at(t);
    Tensor out = x0;
    const double a = std::sqrt(ab);
    const double b = std::sqrt(1.0 - ab);
    for (int i = 0; i < out.size(); ++i) out[i] = a * x0[i] + b * eps[i];
    return out;
}

double posterior_variance(int t, const NoiseSchedule& sched) {
    const double ab_t = sched.alpha_bar_at(t);
    const double ab_prev = sched.alpha_bar_at(t - 1);
    const double v = sched.beta_at(t) * (1.0 - ab_prev) / (1.0 - ab_t);
    return v < kPosteriorVarFloor ? kPosteriorVarFloor : v;
}

GaussianParams posterior_params(const Tensor& x0, const Tensor& x_t, int t, const NoiseSchedule& sched) {
    if (!x0.same_shape(x_t))
        throw std::invalid_argument("posterior_params: x0 and x_t shapes differ");
    const double ab_t = sched.alpha_bar_at(t);
    const double ab_prev = sched.alpha_bar_at(t - 1);
    const double b_t = sched.beta_at(t);
    const double a_t = sched.alpha_at(t);
    const double c0 = std::sqrt(ab_prev) * b_t / (1.0 - ab_t);
    const double ct = std::sqrt(a_t) * (1.0 - ab_prev) / (1.0 - ab_t);
    GaussianParams p;
    p.mean = Tensor::zeros(x0.shape());
    for (int i = 0; i < x0.size(); ++i) p.mean[i] = c0 * x0[i] + ct * x_t[i];
    p.var = posterior_variance(t, sched);
    return p;
}

GaussianParams model_reverse_params(const DenoiserNet& net, const Tensor& x_t, int t, int c,
                                    const NoiseSchedule& sched) {
    const double ab_t = sched.alpha_bar_at(t);
    const double b_t = sched.beta_at(t);
    const double a_t = sched.alpha_at(t);
    const Tensor eps_hat = net.predict(x_t, t, c);
    GaussianParams p;
    p.mean = Tensor::zeros(x_t.shape());
    const double k = b_t / std::sqrt(1.0 - ab_t);
    const double inv_sqrt_a = 1.0 / std::sqrt(a_t);
    for (int i = 0; i < x_t.size(); ++i) p.mean[i] = inv_sqrt_a * (x_t[i] - k * eps_hat[i]);
    p.var = posterior_variance(t, sched);
    return p;
}

NodeId model_reverse_mean(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                          const Tensor& x_t, int t, int c, const NoiseSchedule& sched) {
    const double ab_t = sched.alpha_bar_at(t);
    const double b_t = sched.beta_at(t);
    const double a_t = sched.alpha_at(t);
    const double k = b_t / std::sqrt(1.0 - ab_t);
    const double inv_sqrt_a = 1.0 / std::sqrt(a_t);
    const NodeId eps_hat = net.predict(g, param_nodes, x_t, t, c);
    const NodeId shifted = g.add(g.leaf(x_t), g.scale(eps_hat, -k));
    return g.scale(shifted, inv_sqrt_a);
}

double gaussian_log_density(const Tensor& x, const GaussianParams& p) {
    if (p.var <= 0.0) throw std::invalid_argument("gaussian_log_density: variance must be positive");
    if (!x.same_shape(p.mean))
        throw std::invalid_argument("gaussian_log_density: x and mean shapes differ");
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * p.var);
    double out = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double d = x[i] - p.mean[i];
        out += log_norm - d * d / (2.0 * p.var);
    }
    return out;
}

NodeId gaussian_log_density(Graph& g, const Tensor& x, NodeId mean, double var) {
    if (var <= 0.0) throw std::invalid_argument("gaussian_log_density: variance must be positive");
    if (!x.same_shape(g.value(mean)))
        throw std::invalid_argument("gaussian_log_density: x and mean shapes differ");
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * var) * x.size();
    const NodeId diff = g.sub(g.leaf(x), mean);
    const NodeId quad = g.scale(g.sum(g.square(diff)), -1.0 / (2.0 * var));
    return g.add(quad, g.constant(log_norm));
}

Tensor ddpm_sample(const DenoiserNet& net, int c, const NoiseSchedule& sched, Rng& rng) {
    Tensor x = rng.normal_tensor({net.config().sample_dim});
    for (int t = sched.T; t >= 1; --t) {
        const GaussianParams p = model_reverse_params(net, x, t, c, sched);
        if (t > 1) {
            const double sd = std::sqrt(p.var);
            const Tensor xi = rng.normal_tensor(x.shape());
            for (int i = 0; i < x.size(); ++i) x[i] = p.mean[i] + sd * xi[i];
        } else {
            x = p.mean;
        }
    }
    return x;
}

NodeId pretrain_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                     const std::vector<Tensor>& x0_batch, const std::vector<int>& c_batch,
                     const NoiseSchedule& sched, Rng& rng) {
    if (x0_batch.empty() || x0_batch.size() != c_batch.size())
        throw std::invalid_argument("pretrain_loss: bad batch");
    NodeId total = g.constant(0.0);
    for (size_t i = 0; i < x0_batch.size(); ++i) {
        const int t = rng.uniform_int(1, sched.T);
        const Tensor eps = rng.normal_tensor(x0_batch[i].shape());
        const Tensor x_t = forward_diffuse(x0_batch[i], t, eps, sched);
        const NodeId pred = net.predict(g, param_nodes, x_t, t, c_batch[i]);
        const NodeId residual = g.sub(g.leaf(eps), pred);
        total = g.add(total, g.sum(g.square(residual)));
    }
    return g.scale(total, 1.0 / static_cast<double>(x0_batch.size()));
}

double pretrain_loss_value(const DenoiserNet& net, const std::vector<Tensor>& x0_batch,
                           const std::vector<int>& c_batch, const NoiseSchedule& sched, Rng& rng) {
    Graph g;
    const std::vector<NodeId> ids = net.insert_params(g, false);
    return g.value(pretrain_loss(g, ids, net, x0_batch, c_batch, sched, rng)).item();
}

}  // namespace prefdiff
