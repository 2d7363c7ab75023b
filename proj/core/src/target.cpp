#include "prefdiff/target.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prefdiff {

int ToyTarget::dim() const {
    if (modes.empty()) throw std::invalid_argument("target: no modes");
    return modes.front().mean.size();
}

void ToyTarget::validate() const {
    if (modes.empty()) throw std::invalid_argument("target: no modes");
    if (condition_mode.empty()) throw std::invalid_argument("target: no conditions");
    const int d = modes.front().mean.size();
    double wsum = 0.0;
    for (const Mode& m : modes) {
        if (m.mean.size() != d) throw std::invalid_argument("target: mode dims differ");
        if (m.cov <= 0.0) throw std::invalid_argument("target: mode covariance must be positive");
        if (m.weight <= 0.0) throw std::invalid_argument("target: mode weights must be positive");
        wsum += m.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("target: mode weights must sum to 1");
    for (int c : condition_mode)
        if (c < 0 || c >= static_cast<int>(modes.size()))
            throw std::invalid_argument("target: condition maps to missing mode " + std::to_string(c));
}

Tensor ToyTarget::sample_condition(int c, Rng& rng) const {
    if (c < 0 || c >= n_conditions())
        throw std::invalid_argument("target: unknown condition " + std::to_string(c));
    const Mode& m = modes[static_cast<size_t>(condition_mode[static_cast<size_t>(c)])];
    Tensor x = m.mean;
    const double sd = std::sqrt(m.cov);
    for (int i = 0; i < x.size(); ++i) x[i] += sd * rng.normal();
    return x;
}

int ToyTarget::sample_condition_id(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int c = 0; c < n_conditions(); ++c) {
        acc += modes[static_cast<size_t>(condition_mode[static_cast<size_t>(c)])].weight;
        if (u < acc) return c;
    }
    return n_conditions() - 1;
}

ToyTarget ToyTarget::two_modes(double separation, double cov) {
    ToyTarget t;
    t.modes.push_back({Tensor({2}, {-separation / 2.0, 0.0}), cov, 0.5});
    t.modes.push_back({Tensor({2}, {separation / 2.0, 0.0}), cov, 0.5});
    t.condition_mode = {0, 1};
    return t;
}

double reward_oracle(const ToyTarget& target, int c, const Tensor& x0) {
    if (c < 0 || c >= target.n_conditions())
        throw std::invalid_argument("reward_oracle: unknown condition " + std::to_string(c));
    const Tensor& mean = target.modes[static_cast<size_t>(target.condition_mode[static_cast<size_t>(c)])].mean;
    if (!mean.same_shape(x0)) throw std::invalid_argument("reward_oracle: dimension mismatch");
    double r = 0.0;
    for (int i = 0; i < x0.size(); ++i) {
        const double d = x0[i] - mean[i];
        r -= d * d;
    }
    return r;
}

}  // namespace prefdiff
