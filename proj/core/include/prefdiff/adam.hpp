#pragma once

#include <vector>

#include "prefdiff/tensor.hpp"

namespace prefdiff {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are created from the parameter
// shapes at construction and must match on every step.
class Adam {
public:
    Adam() = default;
    Adam(AdamConfig cfg, const std::vector<Tensor>& params);

    void step(std::vector<Tensor>& params, const std::vector<Tensor>& grads);

    long step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    long t_ = 0;
};

}  // namespace prefdiff
