#pragma once

#include <vector>

namespace prefdiff {

// Discrete-time noise schedule. Timesteps are 1-based: beta_at(1) is the
// first step, alpha_bar_at(0) is defined as 1 so the t=1 posterior exists.
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;

    static NoiseSchedule linear(int T, double beta_start, double beta_end);

    double beta_at(int t) const;
    double alpha_at(int t) const;
    double alpha_bar_at(int t) const;
};

}  // namespace prefdiff
