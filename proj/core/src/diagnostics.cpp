#include "prefdiff/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace prefdiff {

std::vector<WeightCurveRow> weight_curve(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                                         const NoiseSchedule& sched, int bins, int t_lo, int t_hi, Rng rng) {
    if (bins < 2) throw std::invalid_argument("weight_curve: need at least 2 bins");
    if (pairs.empty()) throw std::invalid_argument("weight_curve: no pairs");
    t_lo = std::max(t_lo, 2);  // the t=1 weight is undefined
    if (t_lo >= t_hi) throw std::invalid_argument("weight_curve: empty t range");

    const ClipConfig clip;
    std::vector<WeightCurveRow> rows;
    rows.reserve(static_cast<size_t>(bins));
    const double width = static_cast<double>(t_hi - t_lo + 1) / bins;
    for (int b = 0; b < bins; ++b) {
        const int lo = t_lo + static_cast<int>(std::floor(b * width));
        const int hi = b == bins - 1 ? t_hi : t_lo + static_cast<int>(std::floor((b + 1) * width)) - 1;
        double total = 0.0;
        int n = 0;
        for (const PreferencePair& p : pairs) {
            const int t = rng.uniform_int(lo, hi);
            const Tensor eps = rng.normal_tensor(p.x0_w.shape());
            const Tensor x_t = forward_diffuse(p.x0_w, t, eps, sched);
            total += importance_weight(net, p.x0_w, x_t, t, p.c, sched, rng, clip).raw;
            ++n;
        }
        rows.push_back({b, lo, hi, total / n, n});
    }
    return rows;
}

std::vector<WeightCurveRow> weight_curve(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                                         const NoiseSchedule& sched, int bins, Rng rng) {
    return weight_curve(net, pairs, sched, bins, 2, sched.T, std::move(rng));
}

DensitySnapshot density_snapshot(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                                 int t_lo, int t_hi, const NoiseSchedule& sched, Rng rng) {
    if (pairs.empty()) throw std::invalid_argument("density_snapshot: no pairs");
    if (t_lo >= t_hi) throw std::invalid_argument("density_snapshot: need t_lo < t_hi");
    t_lo = std::max(t_lo, 2);
    double sw = 0.0;
    double sl = 0.0;
    for (const PreferencePair& p : pairs) {
        const int t = rng.uniform_int(t_lo, t_hi);
        const Tensor eps_w = rng.normal_tensor(p.x0_w.shape());
        const Tensor eps_l = rng.normal_tensor(p.x0_l.shape());
        const Tensor x_t_w = forward_diffuse(p.x0_w, t, eps_w, sched);
        const Tensor x_t_l = forward_diffuse(p.x0_l, t, eps_l, sched);
        const GaussianParams qw = posterior_params(p.x0_w, x_t_w, t, sched);
        const GaussianParams ql = posterior_params(p.x0_l, x_t_l, t, sched);
        Tensor xw = qw.mean;
        Tensor xl = ql.mean;
        const double sdw = std::sqrt(qw.var);
        const double sdl = std::sqrt(ql.var);
        for (int i = 0; i < xw.size(); ++i) xw[i] += sdw * rng.normal();
        for (int i = 0; i < xl.size(); ++i) xl[i] += sdl * rng.normal();
        sw += gaussian_log_density(xw, model_reverse_params(net, x_t_w, t, p.c, sched));
        sl += gaussian_log_density(xl, model_reverse_params(net, x_t_l, t, p.c, sched));
    }
    const double n = static_cast<double>(pairs.size());
    return {sw / n, sl / n, (sw - sl) / n};
}

double mean_abs_log_weight(const DenoiserNet& net, const std::vector<PreferencePair>& pairs,
                           const NoiseSchedule& sched, int t_lo, int t_hi, Rng rng) {
    if (pairs.empty()) throw std::invalid_argument("mean_abs_log_weight: no pairs");
    t_lo = std::max(t_lo, 2);
    if (t_lo > t_hi) throw std::invalid_argument("mean_abs_log_weight: empty t range");
    const ClipConfig clip;
    double total = 0.0;
    for (const PreferencePair& p : pairs) {
        const int t = rng.uniform_int(t_lo, t_hi);
        const Tensor eps = rng.normal_tensor(p.x0_w.shape());
        const Tensor x_t = forward_diffuse(p.x0_w, t, eps, sched);
        const StepWeight w = importance_weight(net, p.x0_w, x_t, t, p.c, sched, rng, clip);
        total += std::abs((w.log_p_model - w.log_q_forward) / p.x0_w.size());
    }
    return total / pairs.size();
}

}  // namespace prefdiff
