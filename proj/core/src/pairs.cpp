#include "prefdiff/pairs.hpp"

#include <stdexcept>

namespace prefdiff {

std::vector<PreferencePair> gen_pairs(const DenoiserNet& net, const ToyTarget& target,
                                      const NoiseSchedule& sched, int n, Rng& rng) {
    std::vector<PreferencePair> pairs;
    pairs.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        PreferencePair p;
        p.c = target.sample_condition_id(rng);
        const Tensor a = ddpm_sample(net, p.c, sched, rng);
        const Tensor b = ddpm_sample(net, p.c, sched, rng);
        const double ra = reward_oracle(target, p.c, a);
        const double rb = reward_oracle(target, p.c, b);
        if (ra >= rb) {
            p.x0_w = a;
            p.x0_l = b;
            p.reward_w = ra;
            p.reward_l = rb;
        } else {
            p.x0_w = b;
            p.x0_l = a;
            p.reward_w = rb;
            p.reward_l = ra;
        }
        p.provenance = Provenance::OnPolicy;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::vector<PreferencePair> gen_unlike_pairs(const ToyTarget& target, const DenoiserNet& net,
                                             const NoiseSchedule& sched, int n, Rng& rng) {
    std::vector<PreferencePair> pairs;
    pairs.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        PreferencePair p;
        p.provenance = Provenance::Unlike;
        // Pairs where the net sample outranks the target draw are filtered
        // out, keeping reward_w >= reward_l.
        for (int attempt = 0;; ++attempt) {
            p.c = target.sample_condition_id(rng);
            p.x0_w = target.sample_condition(p.c, rng);
            p.x0_l = ddpm_sample(net, p.c, sched, rng);
            p.reward_w = reward_oracle(target, p.c, p.x0_w);
            p.reward_l = reward_oracle(target, p.c, p.x0_l);
            if (p.reward_w >= p.reward_l) break;
            if (attempt >= 1000)
                throw std::runtime_error("gen_unlike_pairs: net consistently outranks the target");
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace prefdiff
