#pragma once

#include <vector>

#include "prefdiff/rng.hpp"
#include "prefdiff/tensor.hpp"

namespace prefdiff {

// Conditional Gaussian-mixture toy distribution. Each condition (prompt id)
// designates one mode; sampling a condition draws from its mode, and the
// mixture weights set how often each condition appears in generated data.
struct ToyTarget {
    struct Mode {
        Tensor mean;
        double cov = 0.05;    // isotropic variance
        double weight = 1.0;  // mixture weight, normalized on validate()
    };
    std::vector<Mode> modes;
    std::vector<int> condition_mode;  // condition -> mode index

    int dim() const;
    int n_conditions() const { return static_cast<int>(condition_mode.size()); }
    void validate() const;

    Tensor sample_condition(int c, Rng& rng) const;
    int sample_condition_id(Rng& rng) const;  // by mixture weight

    static ToyTarget two_modes(double separation, double cov);
};

// r = -|x0 - mean of the condition's designated mode|^2
double reward_oracle(const ToyTarget& target, int c, const Tensor& x0);

}  // namespace prefdiff
