#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "prefdiff/diffusion.hpp"
#include "prefdiff/weights.hpp"

namespace prefdiff {

// Which sample path the DPO-C&M step weight is computed on.
enum class WeightPath { Winner, Loser, PairMax };

struct LossConfig {
    double beta = 0.02;
    ClipConfig clip;
    std::optional<double> hard_mask_threshold;
    std::optional<std::pair<int, int>> timestep_window;
    WeightPath weight_path = WeightPath::Winner;
};

// One preference pair prepared at a shared timestep t.
struct PrefBatchStep {
    int c = 0;
    int t = 0;
    Tensor x0_w, eps_w, x_t_w;
    Tensor x0_l, eps_l, x_t_l;

    static PrefBatchStep make(int c, int t, const Tensor& x0_w, const Tensor& eps_w, const Tensor& x0_l,
                              const Tensor& eps_l, const NoiseSchedule& sched);
};

// -log sigmoid(r_w - r_l)
double bt_reward_loss(double r_w, double r_l);
NodeId bt_reward_loss(Graph& g, NodeId r_w, NodeId r_l);

// [|e_w - eps(x_t_w)|^2 - |e_w - eps_ref(x_t_w)|^2]
//   - [|e_l - eps(x_t_l)|^2 - |e_l - eps_ref(x_t_l)|^2]
NodeId delta_ell(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                 const DenoiserNet& ref, const PrefBatchStep& batch);
double delta_ell_value(const DenoiserNet& net, const DenoiserNet& ref, const PrefBatchStep& batch);

// -log sigmoid(-beta T delta_ell)
NodeId diffusion_dpo_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                          const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                          const LossConfig& cfg);

// w_tilde(t) * diffusion_dpo_loss; zero contribution when the hard mask is
// set and weight.raw falls below it. With clip.detach_weight=false the
// weight's density ratio is rebuilt on the tape so gradients flow through
// it; weight_on_winner names the path the supplied weight was computed on.
NodeId dpo_cm_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                   const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                   const LossConfig& cfg, const StepWeight& weight, bool weight_on_winner = true);

// -log sigmoid((beta / w_tilde) [(logp_w - ref_logp_w) - (logp_l - ref_logp_l)])
double sdpo_sequence_loss(double logp_w, double logp_l, double ref_logp_w, double ref_logp_l,
                          double w_tilde, double beta);
NodeId sdpo_sequence_loss(Graph& g, NodeId logp_w, NodeId logp_l, NodeId ref_logp_w, NodeId ref_logp_l,
                          double w_tilde, double beta);

// x_{t-1} evaluation points for the transition densities, one per side.
struct PairEvalPoints {
    Tensor x_prev_w;
    Tensor x_prev_l;
};
PairEvalPoints draw_eval_points(const PrefBatchStep& batch, const NoiseSchedule& sched, Rng& rng);
PairEvalPoints posterior_mean_points(const PrefBatchStep& batch, const NoiseSchedule& sched);

// -log sigmoid((beta T / w_tilde) [log p(xp_w|x_t_w) - log p_ref(xp_w|x_t_w)
//                                 - log p(xp_l|x_t_l) + log p_ref(xp_l|x_t_l)])
NodeId sdpo_diffusion_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                           const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                           const LossConfig& cfg, double w_tilde, const PairEvalPoints& points);

// Variant that rebuilds the shared pair weight on the tape when
// clip.detach_weight=false; w_w and w_l are the per-side step weights.
NodeId sdpo_diffusion_loss(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                           const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                           const LossConfig& cfg, const StepWeight& w_w, const StepWeight& w_l,
                           const PairEvalPoints& points);

// Loss together with the logit feeding the logistic, for training logs.
struct LossNodes {
    NodeId loss;
    NodeId logit;
};
LossNodes diffusion_dpo_loss_nodes(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                                   const DenoiserNet& ref, const PrefBatchStep& batch,
                                   const NoiseSchedule& sched, const LossConfig& cfg);
LossNodes dpo_cm_loss_nodes(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                            const DenoiserNet& ref, const PrefBatchStep& batch, const NoiseSchedule& sched,
                            const LossConfig& cfg, const StepWeight& weight, bool weight_on_winner);
LossNodes sdpo_diffusion_loss_nodes(Graph& g, const std::vector<NodeId>& param_nodes, const DenoiserNet& net,
                                    const DenoiserNet& ref, const PrefBatchStep& batch,
                                    const NoiseSchedule& sched, const LossConfig& cfg, const StepWeight& w_w,
                                    const StepWeight& w_l, const PairEvalPoints& points);

// Exact logit scale between the transition-density form above and the
// noise-residual form: logit = -(beta T / w_tilde) * s * delta_ell with
// s = beta_t / (2 alpha_t (1 - abar_{t-1})) when both sides share the fixed
// posterior variance and the densities are evaluated at the posterior means.
double sdpo_delta_ell_scale(int t, const NoiseSchedule& sched);

struct TargetDistResult {
    std::vector<double> p_star;
    double log_z = 0.0;
    std::vector<double> recovered_reward;  // (beta/w) [log(p*/ref) + log Z]
};

// Builds the shaped target distribution p* ~ ref exp((w/beta) r) with the
// partition function computed at the fixed (1+epsilon)/beta exponent, then
// inverts it back to a reward. Computed in log space.
TargetDistResult target_distribution_check(const std::vector<double>& ref_probs,
                                           const std::vector<double>& rewards, double w, double beta,
                                           double epsilon);

}  // namespace prefdiff
