#include "prefdiff/schedule.hpp"

#include <stdexcept>
#include <string>

namespace prefdiff {

NoiseSchedule NoiseSchedule::linear(int T, double beta_start, double beta_end) {
    if (T < 2) throw std::invalid_argument("schedule: T must be >= 2");
    if (!(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0))
        throw std::invalid_argument("schedule: need 0 < beta_start <= beta_end < 1");

    NoiseSchedule s;
    s.T = T;
    s.beta.resize(static_cast<size_t>(T));
    s.alpha.resize(static_cast<size_t>(T));
    s.alpha_bar.resize(static_cast<size_t>(T));
    double prod = 1.0;
    for (int t = 1; t <= T; ++t) {
        const double b = beta_start + (beta_end - beta_start) * static_cast<double>(t - 1) / (T - 1);
        s.beta[t - 1] = b;
        s.alpha[t - 1] = 1.0 - b;
        prod *= s.alpha[t - 1];
        s.alpha_bar[t - 1] = prod;
    }
    return s;
}

double NoiseSchedule::beta_at(int t) const {
    if (t < 1 || t > T) throw std::invalid_argument("schedule: t out of range: " + std::to_string(t));
    return beta[t - 1];
}

double NoiseSchedule::alpha_at(int t) const {
    if (t < 1 || t > T) throw std::invalid_argument("schedule: t out of range: " + std::to_string(t));
    return alpha[t - 1];
}

double NoiseSchedule::alpha_bar_at(int t) const {
    if (t == 0) return 1.0;
    if (t < 0 || t > T) throw std::invalid_argument("schedule: t out of range: " + std::to_string(t));
    return alpha_bar[t - 1];
}

}  // namespace prefdiff
