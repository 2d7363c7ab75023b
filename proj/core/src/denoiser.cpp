#include "prefdiff/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prefdiff {

Tensor sinusoidal_time_embedding(int t, int dim) {
    if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("time embedding dim must be even and >= 2");
    Tensor e({dim});
    const int half = dim / 2;
    for (int i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) / half);
        e[i] = std::sin(t * freq);
        e[half + i] = std::cos(t * freq);
    }
    return e;
}

DenoiserNet::DenoiserNet(DenoiserConfig cfg, Rng& rng) : cfg_(cfg) {
    const int in = input_dim();
    int fan_in = in;
    for (int l = 0; l < cfg_.n_hidden_layers; ++l) {
        Tensor w({cfg_.hidden_dim, fan_in});
        const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (int i = 0; i < w.size(); ++i) w[i] = s * rng.normal();
        params_.push_back(std::move(w));
        params_.push_back(Tensor::zeros({cfg_.hidden_dim}));
        fan_in = cfg_.hidden_dim;
    }
    Tensor w({cfg_.sample_dim, fan_in});
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < w.size(); ++i) w[i] = s * rng.normal();
    params_.push_back(std::move(w));
    params_.push_back(Tensor::zeros({cfg_.sample_dim}));
}

DenoiserNet::DenoiserNet(DenoiserConfig cfg, std::vector<Tensor> params)
    : cfg_(cfg), params_(std::move(params)) {
    check_shapes();
}

void DenoiserNet::check_shapes() const {
    const size_t expected = 2 * static_cast<size_t>(cfg_.n_hidden_layers) + 2;
    if (params_.size() != expected)
        throw std::invalid_argument("denoiser: expected " + std::to_string(expected) + " parameter tensors, got " +
                                    std::to_string(params_.size()));
    int fan_in = input_dim();
    for (int l = 0; l <= cfg_.n_hidden_layers; ++l) {
        const bool last = l == cfg_.n_hidden_layers;
        const int out = last ? cfg_.sample_dim : cfg_.hidden_dim;
        const Tensor& w = params_[2 * static_cast<size_t>(l)];
        const Tensor& b = params_[2 * static_cast<size_t>(l) + 1];
        if (w.shape() != std::vector<int>{out, fan_in} || b.shape() != std::vector<int>{out})
            throw std::invalid_argument("denoiser: parameter shape mismatch at layer " + std::to_string(l));
        fan_in = out;
    }
}

int DenoiserNet::input_dim() const {
    return cfg_.sample_dim + cfg_.time_embed_dim + cfg_.n_conditions;
}

Tensor DenoiserNet::input_vector(const Tensor& x_t, int t, int c) const {
    if (x_t.size() != cfg_.sample_dim)
        throw std::invalid_argument("denoiser: x_t has " + std::to_string(x_t.size()) + " entries, expected " +
                                    std::to_string(cfg_.sample_dim));
    if (c < 0 || c >= cfg_.n_conditions)
        throw std::invalid_argument("denoiser: condition " + std::to_string(c) + " out of range");
    Tensor in({input_dim()});
    int k = 0;
    for (int i = 0; i < x_t.size(); ++i) in[k++] = x_t[i];
    const Tensor te = sinusoidal_time_embedding(t, cfg_.time_embed_dim);
    for (int i = 0; i < te.size(); ++i) in[k++] = te[i];
    for (int i = 0; i < cfg_.n_conditions; ++i) in[k++] = i == c ? 1.0 : 0.0;
    return in;
}

Tensor DenoiserNet::predict(const Tensor& x_t, int t, int c) const {
    Tensor h = input_vector(x_t, t, c);
    for (int l = 0; l <= cfg_.n_hidden_layers; ++l) {
        const Tensor& w = params_[2 * static_cast<size_t>(l)];
        const Tensor& b = params_[2 * static_cast<size_t>(l) + 1];
        Tensor out({w.shape()[0]});
        for (int i = 0; i < w.shape()[0]; ++i) {
            double s = b[i];
            for (int j = 0; j < w.shape()[1]; ++j) s += w.at(i, j) * h[j];
            out[i] = l == cfg_.n_hidden_layers ? s : std::tanh(s);
        }
        h = std::move(out);
    }
    return h;
}

NodeId DenoiserNet::predict(Graph& g, const std::vector<NodeId>& param_nodes, const Tensor& x_t, int t,
                            int c) const {
    if (param_nodes.size() != params_.size())
        throw std::invalid_argument("denoiser: param node count mismatch");
    NodeId h = g.leaf(input_vector(x_t, t, c));
    for (int l = 0; l <= cfg_.n_hidden_layers; ++l) {
        const NodeId w = param_nodes[2 * static_cast<size_t>(l)];
        const NodeId b = param_nodes[2 * static_cast<size_t>(l) + 1];
        h = g.add(g.matmul(w, h), b);
        if (l != cfg_.n_hidden_layers) h = g.tanh(h);
    }
    return h;
}

std::vector<NodeId> DenoiserNet::insert_params(Graph& g, bool track) const {
    std::vector<NodeId> ids;
    ids.reserve(params_.size());
    for (const Tensor& p : params_) ids.push_back(g.leaf(p, track));
    return ids;
}

std::uint64_t DenoiserNet::param_hash() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const Tensor& p : params_) {
        for (int i = 0; i < p.size(); ++i) {
            const double v = p[i];
            const unsigned char* bytes = reinterpret_cast<const unsigned char*>(&v);
            for (size_t b = 0; b < sizeof(double); ++b) {
                h ^= bytes[b];
                h *= 0x100000001B3ULL;
            }
        }
    }
    return h;
}

}  // namespace prefdiff
