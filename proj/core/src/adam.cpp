#include "prefdiff/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prefdiff {

Adam::Adam(AdamConfig cfg, const std::vector<Tensor>& params) : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor& p : params) {
        m_.push_back(Tensor::zeros(p.shape()));
        v_.push_back(Tensor::zeros(p.shape()));
    }
}

void Adam::step(std::vector<Tensor>& params, const std::vector<Tensor>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("adam: parameter/gradient count mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        if (!params[i].same_shape(m_[i]) || !grads[i].same_shape(m_[i]))
            throw std::invalid_argument("adam: shape mismatch for parameter " + std::to_string(i));
        if (!grads[i].all_finite())
            throw std::runtime_error("adam: non-finite gradient for parameter " + std::to_string(i));
    }

    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
        for (int j = 0; j < params[i].size(); ++j) {
            const double g = grads[i][j];
            m_[i][j] = cfg_.beta1 * m_[i][j] + (1.0 - cfg_.beta1) * g;
            v_[i][j] = cfg_.beta2 * v_[i][j] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            params[i][j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

}  // namespace prefdiff
