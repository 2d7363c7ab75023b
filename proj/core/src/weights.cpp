#include "prefdiff/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "prefdiff/mathutil.hpp"

namespace prefdiff {

double clip_weight(double w, const ClipConfig& cfg) {
    if (w <= 0.0) throw std::invalid_argument("clip_weight: weight must be positive");
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("clip_weight: epsilon must be positive");
    return clip_scalar(w, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon);
}

double pair_inverse_weight(double w_w, double w_l, const ClipConfig& cfg) {
    if (w_w <= 0.0 || w_l <= 0.0)
        throw std::invalid_argument("pair_inverse_weight: weights must be positive");
    const double a = clip_weight(1.0 / w_w, cfg);
    const double b = clip_weight(1.0 / w_l, cfg);
    return a > b ? a : b;
}

namespace {
StepWeight finish_weight(int t, double log_p, double log_q, Tensor x_prev, int dim,
                         const ClipConfig& cfg) {
    if (!std::isfinite(log_p) || !std::isfinite(log_q))
        throw std::runtime_error("importance_weight: non-finite density at t=" + std::to_string(t) +
                                 " (log_p=" + std::to_string(log_p) + ", log_q=" + std::to_string(log_q) + ")");
    StepWeight w;
    w.t = t;
    w.log_p_model = log_p;
    w.log_q_forward = log_q;
    w.raw = std::exp((log_p - log_q) / dim);
    // exp underflow would violate the raw > 0 contract downstream.
    if (w.raw <= 0.0) w.raw = std::numeric_limits<double>::min();
    w.clipped = clip_weight(w.raw, cfg);
    w.x_prev = std::move(x_prev);
    return w;
}
}  // namespace

StepWeight importance_weight(const DenoiserNet& net, const Tensor& x0, const Tensor& x_t, int t, int c,
                             const NoiseSchedule& sched, Rng& rng, const ClipConfig& cfg) {
    if (t < 2 || t > sched.T) throw std::invalid_argument("importance_weight: need 2 <= t <= T");
    const GaussianParams q = posterior_params(x0, x_t, t, sched);
    Tensor x_prev = q.mean;
    const double sd = std::sqrt(q.var);
    for (int i = 0; i < x_prev.size(); ++i) x_prev[i] += sd * rng.normal();

    const GaussianParams p = model_reverse_params(net, x_t, t, c, sched);
    const double log_p = gaussian_log_density(x_prev, p);
    const double log_q = gaussian_log_density(x_prev, q);
    return finish_weight(t, log_p, log_q, std::move(x_prev), x0.size(), cfg);
}

StepWeight importance_weight_vs_old(const DenoiserNet& net, const DenoiserNet& old_net, const Tensor& x_t,
                                    int t, int c, const NoiseSchedule& sched, Rng& rng,
                                    const ClipConfig& cfg) {
    if (t < 2 || t > sched.T) throw std::invalid_argument("importance_weight: need 2 <= t <= T");
    const GaussianParams q = model_reverse_params(old_net, x_t, t, c, sched);
    Tensor x_prev = q.mean;
    const double sd = std::sqrt(q.var);
    for (int i = 0; i < x_prev.size(); ++i) x_prev[i] += sd * rng.normal();

    const GaussianParams p = model_reverse_params(net, x_t, t, c, sched);
    const double log_p = gaussian_log_density(x_prev, p);
    const double log_q = gaussian_log_density(x_prev, q);
    return finish_weight(t, log_p, log_q, std::move(x_prev), x_t.size(), cfg);
}

IdentityCheck is_identity_check(const std::vector<double>& p, const std::vector<double>& q,
                                const std::vector<double>& f) {
    if (p.size() != q.size() || p.size() != f.size())
        throw std::invalid_argument("is_identity_check: length mismatch");
    IdentityCheck out;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && q[i] <= 0.0)
            throw std::invalid_argument("is_identity_check: q must cover the support of p");
        out.lhs += p[i] * f[i];
        if (q[i] > 0.0) out.rhs += q[i] * f[i] * (p[i] / q[i]);
    }
    return out;
}

}  // namespace prefdiff
