#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "prefdiff/tensor.hpp"

namespace prefdiff {

// Deterministic random stream. mt19937_64 output is pinned by the standard,
// and all distributions here are derived with explicit arithmetic, so the
// same seed yields the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();                     // [0, 1)
    double uniform(double lo, double hi);
    int uniform_int(int lo, int hi);      // inclusive bounds
    double normal();                      // N(0, 1), Box-Muller
    Tensor normal_tensor(const std::vector<int>& shape);

    // Independent child stream derived from this stream's seed and a label.
    // Children with the same label coincide; sibling labels are independent.
    Rng split(std::string_view label) const;
    Rng split(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace prefdiff
