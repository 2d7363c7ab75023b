#pragma once

#include <vector>

#include "prefdiff/diffusion.hpp"
#include "prefdiff/target.hpp"

namespace prefdiff {

enum class Provenance { OnPolicy, Unlike };

struct PreferencePair {
    int c = 0;
    Tensor x0_w;
    Tensor x0_l;
    double reward_w = 0.0;
    double reward_l = 0.0;
    Provenance provenance = Provenance::OnPolicy;
};

// Two samples from the net per pair; the one ranked higher by the oracle
// wins. Ties go to the first draw, so a fixed seed fixes the result.
std::vector<PreferencePair> gen_pairs(const DenoiserNet& net, const ToyTarget& target,
                                      const NoiseSchedule& sched, int n, Rng& rng);

// Winners come from the target itself (an external, stronger generator the
// net assigns low probability to); losers from the net.
std::vector<PreferencePair> gen_unlike_pairs(const ToyTarget& target, const DenoiserNet& net,
                                             const NoiseSchedule& sched, int n, Rng& rng);

}  // namespace prefdiff
