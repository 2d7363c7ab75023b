#pragma once

#include <cstdint>
#include <vector>

#include "prefdiff/graph.hpp"
#include "prefdiff/rng.hpp"
#include "prefdiff/tensor.hpp"

namespace prefdiff {

struct DenoiserConfig {
    int sample_dim = 2;
    int n_conditions = 2;
    int hidden_dim = 32;
    int n_hidden_layers = 2;
    int time_embed_dim = 8;

    bool operator==(const DenoiserConfig&) const = default;
};

// Epsilon-prediction MLP over concat(x_t, sinusoidal timestep embedding,
// one-hot condition embedding). tanh hidden activations, linear output.
class DenoiserNet {
public:
    DenoiserNet() = default;
    DenoiserNet(DenoiserConfig cfg, Rng& rng);
    DenoiserNet(DenoiserConfig cfg, std::vector<Tensor> params);

    const DenoiserConfig& config() const { return cfg_; }
    std::vector<Tensor>& params() { return params_; }
    const std::vector<Tensor>& params() const { return params_; }

    // Plain forward pass; deterministic in (x_t, t, c, parameters).
    Tensor predict(const Tensor& x_t, int t, int c) const;

    // Tape forward against parameter leaves previously inserted with
    // insert_params (one node per parameter, same order).
    NodeId predict(Graph& g, const std::vector<NodeId>& param_nodes, const Tensor& x_t, int t, int c) const;

    std::vector<NodeId> insert_params(Graph& g, bool track) const;

    Tensor input_vector(const Tensor& x_t, int t, int c) const;
    int input_dim() const;

    // FNV-1a over the raw parameter bytes; used to assert frozen references.
    std::uint64_t param_hash() const;

private:
    void check_shapes() const;

    DenoiserConfig cfg_;
    std::vector<Tensor> params_;  // W0,b0,W1,b1,...,Wout,bout
};

Tensor sinusoidal_time_embedding(int t, int dim);

}  // namespace prefdiff
