#pragma once

#include <vector>

#include "prefdiff/diffusion.hpp"

namespace prefdiff {

struct ClipConfig {
    double epsilon = 0.2;
    bool detach_weight = true;
};

// Single-timestep importance weight w(t) = exp(mean per-dim log-ratio of the
// model reverse density to the denominator density), evaluated at one draw
// of x_{t-1}. The draw is kept so graph-mode losses can rebuild the ratio.
struct StepWeight {
    int t = 0;
    double raw = 0.0;
    double clipped = 0.0;
    double log_p_model = 0.0;
    double log_q_forward = 0.0;
    Tensor x_prev;
};

double clip_weight(double w, const ClipConfig& cfg);

// max(clip(1/w_w), clip(1/w_l)); the shared pair weight.
double pair_inverse_weight(double w_w, double w_l, const ClipConfig& cfg);

// Denominator = forward posterior q(x_{t-1} | x_t, x0); x_{t-1} ~ q.
StepWeight importance_weight(const DenoiserNet& net, const Tensor& x0, const Tensor& x_t, int t, int c,
                             const NoiseSchedule& sched, Rng& rng, const ClipConfig& cfg);

// Denominator = a previous model iterate; x_{t-1} ~ p_old(.|x_t).
StepWeight importance_weight_vs_old(const DenoiserNet& net, const DenoiserNet& old_net, const Tensor& x_t,
                                    int t, int c, const NoiseSchedule& sched, Rng& rng,
                                    const ClipConfig& cfg);

struct IdentityCheck {
    double lhs = 0.0;  // sum_x p(x) f(x)
    double rhs = 0.0;  // sum_x q(x) f(x) p(x)/q(x)
};

// Importance-sampling identity over a discrete support. q must be positive
// wherever p is.
IdentityCheck is_identity_check(const std::vector<double>& p, const std::vector<double>& q,
                                const std::vector<double>& f);

}  // namespace prefdiff
