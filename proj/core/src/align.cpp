#include "prefdiff/align.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prefdiff {

std::string method_name(Method m) {
    switch (m) {
        case Method::DiffusionDpo: return "dpo";
        case Method::DpoCm: return "cm";
        case Method::Sdpo: return "sdpo";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "dpo") return Method::DiffusionDpo;
    if (name == "cm") return Method::DpoCm;
    if (name == "sdpo") return Method::Sdpo;
    throw std::invalid_argument("unknown method '" + name + "' (expected dpo|cm|sdpo)");
}

namespace {

struct DensityProbe {
    // Fixed probe items so the trace is comparable across checkpoints.
    struct Item {
        int c;
        int t;
        Tensor x_t_w, x_prev_w;
        Tensor x_t_l, x_prev_l;
    };
    std::vector<Item> items;

    DensityProbe(const std::vector<PreferencePair>& pairs, const NoiseSchedule& sched, int n_pairs,
                 int t_lo, int t_hi, Rng rng) {
        const int n = std::min<int>(n_pairs, static_cast<int>(pairs.size()));
        for (int i = 0; i < n; ++i) {
            const PreferencePair& p = pairs[static_cast<size_t>(i)];
            Item it;
            it.c = p.c;
            it.t = rng.uniform_int(t_lo, t_hi);
            const Tensor eps_w = rng.normal_tensor(p.x0_w.shape());
            const Tensor eps_l = rng.normal_tensor(p.x0_l.shape());
            it.x_t_w = forward_diffuse(p.x0_w, it.t, eps_w, sched);
            it.x_t_l = forward_diffuse(p.x0_l, it.t, eps_l, sched);
            const GaussianParams qw = posterior_params(p.x0_w, it.x_t_w, it.t, sched);
            const GaussianParams ql = posterior_params(p.x0_l, it.x_t_l, it.t, sched);
            it.x_prev_w = qw.mean;
            it.x_prev_l = ql.mean;
            const double sdw = std::sqrt(qw.var);
            const double sdl = std::sqrt(ql.var);
            for (int k = 0; k < it.x_prev_w.size(); ++k) it.x_prev_w[k] += sdw * rng.normal();
            for (int k = 0; k < it.x_prev_l.size(); ++k) it.x_prev_l[k] += sdl * rng.normal();
            items.push_back(std::move(it));
        }
    }

    DensityTraceRow row(int step, const DenoiserNet& net, const NoiseSchedule& sched) const {
        double sw = 0.0;
        double sl = 0.0;
        for (const Item& it : items) {
            sw += gaussian_log_density(it.x_prev_w, model_reverse_params(net, it.x_t_w, it.t, it.c, sched));
            sl += gaussian_log_density(it.x_prev_l, model_reverse_params(net, it.x_t_l, it.t, it.c, sched));
        }
        const double n = static_cast<double>(items.size());
        return {step, sw / n, sl / n, (sw - sl) / n};
    }
};

}  // namespace

AlignResult align(const DenoiserNet& net, const DenoiserNet& ref, const std::vector<PreferencePair>& pairs,
                  const NoiseSchedule& sched, const RunConfig& cfg) {
    if (pairs.empty()) throw std::invalid_argument("align: no pairs");
    const std::uint64_t ref_hash = ref.param_hash();

    AlignResult result;
    result.net = net;

    Rng master(cfg.seed);
    Rng train_rng = master.split("align-train");

    int t_lo = cfg.method == Method::DiffusionDpo ? 1 : 2;
    int t_hi = sched.T;
    if (cfg.loss.timestep_window) {
        t_lo = std::max(t_lo, cfg.loss.timestep_window->first);
        t_hi = std::min(t_hi, cfg.loss.timestep_window->second);
        if (t_lo >= t_hi) throw std::invalid_argument("align: empty timestep window");
    }

    const int trace_lo = std::max(2, sched.T / 2);
    const int trace_hi = std::max(trace_lo + 1, 3 * sched.T / 5);
    DensityProbe probe(pairs, sched, cfg.density_probe_pairs, trace_lo, trace_hi, master.split("align-probe"));
    result.trace.push_back(probe.row(0, result.net, sched));

    Adam adam(cfg.opt, result.net.params());

    for (int step = 1; step <= cfg.steps; ++step) {
        const PreferencePair& pair =
            pairs[static_cast<size_t>(train_rng.uniform_int(0, static_cast<int>(pairs.size()) - 1))];
        const int t = train_rng.uniform_int(t_lo, t_hi);
        const Tensor eps_w = train_rng.normal_tensor(pair.x0_w.shape());
        const Tensor eps_l = train_rng.normal_tensor(pair.x0_l.shape());
        const PrefBatchStep batch = PrefBatchStep::make(pair.c, t, pair.x0_w, eps_w, pair.x0_l, eps_l, sched);

        Graph g;
        const std::vector<NodeId> pnodes = result.net.insert_params(g, true);

        LossNodes nodes{};
        double w_raw = 1.0;
        double w_clipped = 1.0;
        switch (cfg.method) {
            case Method::DiffusionDpo: {
                nodes = diffusion_dpo_loss_nodes(g, pnodes, result.net, ref, batch, sched, cfg.loss);
                break;
            }
            case Method::DpoCm: {
                StepWeight w;
                bool on_winner = true;
                if (cfg.loss.weight_path == WeightPath::Winner) {
                    w = importance_weight(result.net, batch.x0_w, batch.x_t_w, t, batch.c, sched, train_rng,
                                          cfg.loss.clip);
                } else if (cfg.loss.weight_path == WeightPath::Loser) {
                    w = importance_weight(result.net, batch.x0_l, batch.x_t_l, t, batch.c, sched, train_rng,
                                          cfg.loss.clip);
                    on_winner = false;
                } else {
                    const StepWeight ww = importance_weight(result.net, batch.x0_w, batch.x_t_w, t, batch.c,
                                                            sched, train_rng, cfg.loss.clip);
                    const StepWeight wl = importance_weight(result.net, batch.x0_l, batch.x_t_l, t, batch.c,
                                                            sched, train_rng, cfg.loss.clip);
                    on_winner = ww.clipped >= wl.clipped;
                    w = on_winner ? ww : wl;
                }
                nodes = dpo_cm_loss_nodes(g, pnodes, result.net, ref, batch, sched, cfg.loss, w, on_winner);
                w_raw = w.raw;
                const bool masked = cfg.loss.hard_mask_threshold && w.raw < *cfg.loss.hard_mask_threshold;
                w_clipped = masked ? 0.0 : w.clipped;
                result.weight_log.push_back({step, t, w.raw, w.clipped, w.log_p_model, w.log_q_forward});
                break;
            }
            case Method::Sdpo: {
                const StepWeight ww = importance_weight(result.net, batch.x0_w, batch.x_t_w, t, batch.c,
                                                        sched, train_rng, cfg.loss.clip);
                const StepWeight wl = importance_weight(result.net, batch.x0_l, batch.x_t_l, t, batch.c,
                                                        sched, train_rng, cfg.loss.clip);
                const PairEvalPoints points = draw_eval_points(batch, sched, train_rng);
                nodes = sdpo_diffusion_loss_nodes(g, pnodes, result.net, ref, batch, sched, cfg.loss, ww, wl,
                                                  points);
                w_raw = ww.raw;
                w_clipped = pair_inverse_weight(ww.raw, wl.raw, cfg.loss.clip);
                result.weight_log.push_back({step, t, ww.raw, ww.clipped, ww.log_p_model, ww.log_q_forward});
                result.weight_log.push_back({step, t, wl.raw, wl.clipped, wl.log_p_model, wl.log_q_forward});
                break;
            }
        }

        const double loss_value = g.value(nodes.loss).item();
        const double logit_value = g.value(nodes.logit).item();
        if (!std::isfinite(loss_value)) {
            std::string msg = "align: non-finite loss at step " + std::to_string(step) + " (t=" +
                              std::to_string(t) + ", method=" + method_name(cfg.method) + ")";
            if (!result.weight_log.empty()) {
                const WeightLogRow& wr = result.weight_log.back();
                msg += " weight raw=" + std::to_string(wr.raw) + " clipped=" + std::to_string(wr.clipped) +
                       " log_p=" + std::to_string(wr.log_p_model) + " log_q=" + std::to_string(wr.log_q_forward);
            }
            throw std::runtime_error(msg);
        }

        g.backward(nodes.loss);
        std::vector<Tensor> grads;
        grads.reserve(pnodes.size());
        for (size_t i = 0; i < pnodes.size(); ++i) {
            if (g.has_grad(pnodes[i]))
                grads.push_back(g.grad(pnodes[i]));
            else
                grads.push_back(Tensor::zeros(result.net.params()[i].shape()));
        }
        adam.step(result.net.params(), grads);

        result.log.push_back({step, t, loss_value, logit_value, w_raw, w_clipped});
        if (cfg.diag_cadence > 0 && step % cfg.diag_cadence == 0)
            result.trace.push_back(probe.row(step, result.net, sched));
    }

    if (ref.param_hash() != ref_hash) throw std::runtime_error("align: reference model changed during run");
    return result;
}

PretrainResult pretrain(const DenoiserConfig& net_cfg, const ToyTarget& dist, const NoiseSchedule& sched,
                        int steps, int batch, const AdamConfig& opt, Rng& rng) {
    dist.validate();
    Rng init = rng.split("pretrain-init");
    PretrainResult out{DenoiserNet(net_cfg, init), {}};
    Adam adam(opt, out.net.params());
    Rng data = rng.split("pretrain-data");
    for (int step = 1; step <= steps; ++step) {
        std::vector<Tensor> x0s;
        std::vector<int> cs;
        x0s.reserve(static_cast<size_t>(batch));
        for (int b = 0; b < batch; ++b) {
            const int c = dist.sample_condition_id(data);
            cs.push_back(c);
            x0s.push_back(dist.sample_condition(c, data));
        }
        Graph g;
        const std::vector<NodeId> ids = out.net.insert_params(g, true);
        const NodeId loss = pretrain_loss(g, ids, out.net, x0s, cs, sched, data);
        g.backward(loss);
        std::vector<Tensor> grads;
        grads.reserve(ids.size());
        for (NodeId id : ids) grads.push_back(g.grad(id));
        adam.step(out.net.params(), grads);
        if (step == 1 || step % 50 == 0 || step == steps)
            out.loss_log.emplace_back(step, g.value(loss).item());
    }
    return out;
}

double mean_oracle_reward(const DenoiserNet& net, const ToyTarget& target, const NoiseSchedule& sched,
                          int n_samples, Rng& rng) {
    double total = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const int c = target.sample_condition_id(rng);
        const Tensor x = ddpm_sample(net, c, sched, rng);
        total += reward_oracle(target, c, x);
    }
    return total / n_samples;
}

IterativeResult iterative_align(const DenoiserNet& net, const DenoiserNet& ref, const ToyTarget& target,
                                const NoiseSchedule& sched, int rounds, int pairs_per_round, int epochs,
                                const RunConfig& cfg) {
    if (rounds < 1) throw std::invalid_argument("iterative_align: rounds must be >= 1");
    IterativeResult out;
    out.net = net;
    Rng master(cfg.seed);
    // One eval stream shared by every round, so the per-round rewards form
    // a paired series rather than independent Monte-Carlo estimates.
    const Rng eval_base = master.split("round-eval");
    for (int r = 1; r <= rounds; ++r) {
        Rng round_rng = master.split(static_cast<std::uint64_t>(r));
        Rng pair_rng = round_rng.split("pairs");
        const std::vector<PreferencePair> pairs = gen_pairs(out.net, target, sched, pairs_per_round, pair_rng);

        RunConfig round_cfg = cfg;
        round_cfg.steps = epochs * pairs_per_round;
        round_cfg.seed = round_rng.split("align").seed();
        round_cfg.run_id = cfg.run_id + "-round" + std::to_string(r);
        AlignResult ar = align(out.net, ref, pairs, sched, round_cfg);
        out.net = std::move(ar.net);

        Rng eval_rng = eval_base;
        out.rounds.push_back({r, mean_oracle_reward(out.net, target, sched, 256, eval_rng)});
    }
    return out;
}

}  // namespace prefdiff
