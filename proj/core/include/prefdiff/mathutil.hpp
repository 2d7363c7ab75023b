#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace prefdiff {

// min(max(x, lo), hi); throws if lo > hi.
inline double clip_scalar(double x, double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("clip_scalar: lo > hi");
    return x < lo ? lo : (x > hi ? hi : x);
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)), stable on both tails.
inline double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

inline double log_sum_exp(const std::vector<double>& xs) {
    double m = xs.front();
    for (double x : xs)
        if (x > m) m = x;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace prefdiff
