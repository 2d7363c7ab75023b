#include "prefdiff/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "prefdiff/mathutil.hpp"

namespace prefdiff {

PrefBatchStep PrefBatchStep::make(int c, int t, const Tensor& x0_w, const Tensor& eps_w, const Tensor& x0_l,
                                  const Tensor& eps_l, const NoiseSchedule& sched) {
    if (!x0_w.same_shape(x0_l) || !x0_w.same_shape(eps_w) || !x0_l.same_shape(eps_l))
        throw std::invalid_argument("PrefBatchStep: winner/loser shapes differ");
    PrefBatchStep b;
    b.c = c;
    b.t = t;
    b.x0_w = x0_w;
    b.eps_w = eps_w;
    b.x_t_w = forward_diffuse(x0_w, t, eps_w, sched);
    b.x0_l = x0_l;
    b.eps_l = eps_l;
    b.x_t_l = forward_diffuse(x0_l, t, eps_l, sched);
    return b;
}

double bt_reward_loss(double r_w, double r_l) { return -log_sigmoid(r_w - r_l); }

NodeId bt_reward_loss(Graph& g, NodeId r_w, NodeId r_l) {
    return g.scale(g.log_sigmoid(g.sub(r_w, r_l)), -1.0);
}

namespace {
// |eps - eps_theta(x_t)|^2 as a graph node.
NodeId residual_sq(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                   const Tensor& eps, const Tensor& x_t, int t, int c) {
    const NodeId pred = net.predict(g, param_nodes, x_t, t, c);
    return g.sum(g.square(g.sub(g.leaf(eps), pred)));
}
}  // namespace

NodeId delta_ell(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                 const DenoiserNet& ref, const PrefBatchStep& b) {
    const std::vector<NodeId> ref_nodes = ref.insert_params(g, false);
    const NodeId w_model = residual_sq(g, param_nodes, net, b.eps_w, b.x_t_w, b.t, b.c);
    const NodeId w_ref = residual_sq(g, ref_nodes, ref, b.eps_w, b.x_t_w, b.t, b.c);
    const NodeId l_model = residual_sq(g, param_nodes, net, b.eps_l, b.x_t_l, b.t, b.c);
    const NodeId l_ref = residual_sq(g, ref_nodes, ref, b.eps_l, b.x_t_l, b.t, b.c);
    return g.sub(g.sub(w_model, w_ref), g.sub(l_model, l_ref));
}

double delta_ell_value(const DenoiserNet& net, const DenoiserNet& ref, const PrefBatchStep& b) {
    Graph g;
    const std::vector<NodeId> ids = net.insert_params(g, false);
    return g.value(delta_ell(g, ids, net, ref, b)).item();
}

LossNodes diffusion_dpo_loss_nodes(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                                   const DenoiserNet& ref, const PrefBatchStep& batch,
                                   const NoiseSchedule& sched, const LossConfig& cfg) {
    if (cfg.beta <= 0.0) throw std::invalid_argument("diffusion_dpo_loss: beta must be positive");
    const NodeId dl = delta_ell(g, param_nodes, net, ref, batch);
    const NodeId logit = g.scale(dl, -cfg.beta * sched.T);  // omega(lambda_t) == 1
    return {g.scale(g.log_sigmoid(logit), -1.0), logit};
}

NodeId diffusion_dpo_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                          const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                          const LossConfig& cfg) {
    return diffusion_dpo_loss_nodes(g, param_nodes, net, ref, batch, sched, cfg).loss;
}

namespace {
// Rebuilds a step weight's per-dim log density ratio on the tape: the model
// side depends on the parameters, the posterior side is the recorded
// constant. Returns z = log p_theta(x_prev | x_t) - log q.
NodeId weight_log_ratio(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                        const Tensor& x_t, int t, int c, const NoiseSchedule& sched,
                        const StepWeight& w) {
    const double var = posterior_variance(t, sched);
    const NodeId mean = model_reverse_mean(g, param_nodes, net, x_t, t, c, sched);
    const NodeId log_p = gaussian_log_density(g, w.x_prev, mean, var);
    return g.add(log_p, g.constant(-w.log_q_forward));
}
}  // namespace

LossNodes dpo_cm_loss_nodes(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                            const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                            const LossConfig& cfg, const StepWeight& weight, bool weight_on_winner) {
    if (cfg.hard_mask_threshold && weight.raw < *cfg.hard_mask_threshold) {
        const NodeId zero = g.constant(0.0);
        return {zero, zero};
    }
    const LossNodes base = diffusion_dpo_loss_nodes(g, param_nodes, net, ref, batch, sched, cfg);
    if (cfg.clip.detach_weight) return {g.scale(base.loss, weight.clipped), base.logit};

    const Tensor& x_t = weight_on_winner ? batch.x_t_w : batch.x_t_l;
    const int dim = x_t.size();
    const NodeId z = weight_log_ratio(g, param_nodes, net, x_t, batch.t, batch.c, sched, weight);
    const NodeId w_node = g.exp(g.scale(z, 1.0 / dim));
    const NodeId w_clipped = g.clip(w_node, 1.0 - cfg.clip.epsilon, 1.0 + cfg.clip.epsilon);
    return {g.mul(w_clipped, base.loss), base.logit};
}

NodeId dpo_cm_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                   const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                   const LossConfig& cfg, const StepWeight& weight, bool weight_on_winner) {
    return dpo_cm_loss_nodes(g, param_nodes, net, ref, batch, sched, cfg, weight, weight_on_winner).loss;
}

double sdpo_sequence_loss(double logp_w, double logp_l, double ref_logp_w, double ref_logp_l,
                          double w_tilde, double beta) {
    if (w_tilde <= 0.0) throw std::invalid_argument("sdpo_sequence_loss: w_tilde must be positive");
    const double logit = (beta / w_tilde) * ((logp_w - ref_logp_w) - (logp_l - ref_logp_l));
    return -log_sigmoid(logit);
}

NodeId sdpo_sequence_loss(Graph& g, NodeId logp_w, NodeId logp_l, NodeId ref_logp_w, NodeId ref_logp_l,
                          double w_tilde, double beta) {
    if (w_tilde <= 0.0) throw std::invalid_argument("sdpo_sequence_loss: w_tilde must be positive");
    const NodeId diff = g.sub(g.sub(logp_w, ref_logp_w), g.sub(logp_l, ref_logp_l));
    const NodeId logit = g.scale(diff, beta / w_tilde);
    return g.scale(g.log_sigmoid(logit), -1.0);
}

PairEvalPoints draw_eval_points(const PrefBatchStep& batch, const NoiseSchedule& sched, Rng& rng) {
    const GaussianParams qw = posterior_params(batch.x0_w, batch.x_t_w, batch.t, sched);
    const GaussianParams ql = posterior_params(batch.x0_l, batch.x_t_l, batch.t, sched);
    PairEvalPoints p;
    p.x_prev_w = qw.mean;
    p.x_prev_l = ql.mean;
    const double sdw = std::sqrt(qw.var);
    const double sdl = std::sqrt(ql.var);
    for (int i = 0; i < p.x_prev_w.size(); ++i) p.x_prev_w[i] += sdw * rng.normal();
    for (int i = 0; i < p.x_prev_l.size(); ++i) p.x_prev_l[i] += sdl * rng.normal();
    return p;
}

PairEvalPoints posterior_mean_points(const PrefBatchStep& batch, const NoiseSchedule& sched) {
    PairEvalPoints p;
    p.x_prev_w = posterior_params(batch.x0_w, batch.x_t_w, batch.t, sched).mean;
    p.x_prev_l = posterior_params(batch.x0_l, batch.x_t_l, batch.t, sched).mean;
    return p;
}

namespace {
// (logp - logp_ref) for one side of the pair at a fixed evaluation point.
NodeId side_log_ratio(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                      const std::vector<NodeId>& ref_nodes, const DenoiserNet& ref, const Tensor& x_t,
                      const Tensor& x_prev, int t, int c, const NoiseSchedule& sched) {
    const double var = posterior_variance(t, sched);
    const NodeId mean = model_reverse_mean(g, param_nodes, net, x_t, t, c, sched);
    const NodeId ref_mean = model_reverse_mean(g, ref_nodes, ref, x_t, t, c, sched);
    return g.sub(gaussian_log_density(g, x_prev, mean, var), gaussian_log_density(g, x_prev, ref_mean, var));
}

NodeId sdpo_density_logit_core(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                               const DenoiserNet& ref, const PrefBatchStep& batch,
                               const NoiseSchedule& sched, const PairEvalPoints& points) {
    const std::vector<NodeId> ref_nodes = ref.insert_params(g, false);
    const NodeId w_side = side_log_ratio(g, param_nodes, net, ref_nodes, ref, batch.x_t_w, points.x_prev_w,
                                         batch.t, batch.c, sched);
    const NodeId l_side = side_log_ratio(g, param_nodes, net, ref_nodes, ref, batch.x_t_l, points.x_prev_l,
                                         batch.t, batch.c, sched);
    return g.sub(w_side, l_side);
}
}  // namespace

NodeId sdpo_diffusion_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                           const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                           const LossConfig& cfg, double w_tilde, const PairEvalPoints& points) {
    if (w_tilde <= 0.0) throw std::invalid_argument("sdpo_diffusion_loss: w_tilde must be positive");
    const NodeId diff = sdpo_density_logit_core(g, param_nodes, net, ref, batch, sched, points);
    const NodeId logit = g.scale(diff, cfg.beta * sched.T / w_tilde);
    return g.scale(g.log_sigmoid(logit), -1.0);
}

LossNodes sdpo_diffusion_loss_nodes(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                                    const DenoiserNet& ref, const PrefBatchStep& batch,
                                    const NoiseSchedule& sched, const LossConfig& cfg, const StepWeight& w_w,
                                    const StepWeight& w_l, const PairEvalPoints& points) {
    const double w_tilde = pair_inverse_weight(w_w.raw, w_l.raw, cfg.clip);
    const NodeId diff = sdpo_density_logit_core(g, param_nodes, net, ref, batch, sched, points);

    NodeId logit;
    if (cfg.clip.detach_weight) {
        logit = g.scale(diff, cfg.beta * sched.T / w_tilde);
    } else {
        // w_tilde = max over sides of clip(1/w); gradient follows the argmax
        // branch, and only when that branch's clip is not binding. On an
        // unclipped branch 1/w_tilde = w = exp(z/dim), which the tape
        // expresses directly.
        const double inv_w = clip_weight(1.0 / w_w.raw, cfg.clip);
        const double inv_l = clip_weight(1.0 / w_l.raw, cfg.clip);
        const bool winner_branch = inv_w >= inv_l;
        const StepWeight& chosen = winner_branch ? w_w : w_l;
        const double chosen_clip = winner_branch ? inv_w : inv_l;
        const bool clipped = chosen_clip != 1.0 / chosen.raw;
        if (clipped) {
            logit = g.scale(diff, cfg.beta * sched.T / w_tilde);
        } else {
            const Tensor& x_t = winner_branch ? batch.x_t_w : batch.x_t_l;
            const int dim = x_t.size();
            const NodeId z = weight_log_ratio(g, param_nodes, net, x_t, batch.t, batch.c, sched, chosen);
            const NodeId inv_wt = g.exp(g.scale(z, 1.0 / dim));
            logit = g.scale(g.mul(inv_wt, diff), cfg.beta * sched.T);
        }
    }
    return {g.scale(g.log_sigmoid(logit), -1.0), logit};
}

NodeId sdpo_diffusion_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                           const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                           const LossConfig& cfg, const StepWeight& w_w, const StepWeight& w_l,
                           const PairEvalPoints& points) {
    return sdpo_diffusion_loss_nodes(g, param_nodes, net, ref, batch, sched, cfg, w_w, w_l, points).loss;
}

double sdpo_delta_ell_scale(int t, const NoiseSchedule& sched) {
    return sched.beta_at(t) / (2.0 * sched.alpha_at(t) * (1.0 - sched.alpha_bar_at(t - 1)));
}

TargetDistResult target_distribution_check(const std::vector<double>& ref_probs,
                                           const std::vector<double>& rewards, double w, double beta,
                                           double epsilon) {
    if (ref_probs.empty() || ref_probs.size() != rewards.size())
        throw std::invalid_argument("target_distribution_check: bad inputs");
    if (beta <= 0.0) throw std::invalid_argument("target_distribution_check: beta must be positive");
    double total = 0.0;
    for (double p : ref_probs) {
        if (p <= 0.0) throw std::invalid_argument("target_distribution_check: ref probs must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("target_distribution_check: ref probs must sum to 1");

    const size_t n = ref_probs.size();
    std::vector<double> z_terms(n);
    for (size_t i = 0; i < n; ++i)
        z_terms[i] = std::log(ref_probs[i]) + (1.0 + epsilon) / beta * rewards[i];
    TargetDistResult out;
    out.log_z = log_sum_exp(z_terms);
    out.p_star.resize(n);
    out.recovered_reward.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double log_p = std::log(ref_probs[i]) + (w / beta) * rewards[i] - out.log_z;
        out.p_star[i] = std::exp(log_p);
        out.recovered_reward[i] = beta / w * (std::log(out.p_star[i] / ref_probs[i]) + out.log_z);
    }
    return out;
}

}  // namespace prefdiff
