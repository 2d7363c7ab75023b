#include "prefdiff/flow_sde.hpp"

#include <cmath>
#include <stdexcept>

namespace prefdiff {

InterpolantSchedule InterpolantSchedule::linear(double eps_const) {
    if (eps_const < 0.0) throw std::invalid_argument("interpolant: epsilon must be nonnegative");
    InterpolantSchedule s;
    s.alpha = [](double t) { return t; };
    s.beta = [](double t) { return 1.0 - t; };
    s.alpha_dot = [](double) { return 1.0; };
    s.beta_dot = [](double) { return -1.0; };
    s.epsilon = [eps_const](double) { return eps_const; };
    return s;
}

Tensor drift_field(double t, const Tensor& x, const DenoiserField& eta, const InterpolantSchedule& sched) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("drift_field: t must lie in (0,1)");
    const double a = sched.alpha(t);
    const double b = sched.beta(t);
    if (a == 0.0 || b == 0.0) throw std::domain_error("drift_field: schedule vanishes at t; clamp the grid");
    const double ad = sched.alpha_dot(t);
    const double bd = sched.beta_dot(t);
    const double eps_t = sched.epsilon(t);

    const Tensor e = eta(t, x);
    if (!e.same_shape(x)) throw std::invalid_argument("drift_field: denoiser output shape mismatch");

    const double score_denom = sched.score_denominator_beta ? b : a;
    Tensor out = x;
    for (int i = 0; i < x.size(); ++i) {
        double v = ad * e[i] + (bd / b) * (x[i] - a * e[i]);
        if (eps_t != 0.0) v -= eps_t / score_denom * e[i];
        out[i] = v;
    }
    return out;
}

Tensor em_step(const Tensor& x, double t, double dt, const Tensor& b, double eps_t, const Tensor& xi) {
    (void)t;
    if (dt <= 0.0) throw std::invalid_argument("em_step: dt must be positive");
    if (eps_t < 0.0) throw std::invalid_argument("em_step: eps_t must be nonnegative");
    if (!b.same_shape(x) || !xi.same_shape(x)) throw std::invalid_argument("em_step: shape mismatch");
    const double noise = std::sqrt(2.0 * eps_t * dt);
    Tensor out = x;
    for (int i = 0; i < x.size(); ++i) out[i] = x[i] + b[i] * dt + noise * xi[i];
    return out;
}

std::vector<PathPoint> sde_sample_path(const DenoiserField& eta, const InterpolantSchedule& sched,
                                       int n_steps, int dim, Rng& rng) {
    if (n_steps < 2) throw std::invalid_argument("sde_sample: need n_steps >= 2");
    std::vector<PathPoint> path;
    path.reserve(static_cast<size_t>(n_steps) + 1);
    Tensor x = rng.normal_tensor({dim});
    double t = sched.t_lo;
    const double dt = (sched.t_hi - sched.t_lo) / n_steps;
    path.push_back({t, x});
    for (int j = 0; j < n_steps; ++j) {
        const Tensor b = drift_field(t, x, eta, sched);
        const Tensor xi = rng.normal_tensor({dim});
        x = em_step(x, t, dt, b, sched.epsilon(t), xi);
        t = sched.t_lo + (j + 1) * dt;
        path.push_back({t, x});
    }
    return path;
}

Tensor sde_sample(const DenoiserField& eta, const InterpolantSchedule& sched, int n_steps, int dim,
                  Rng& rng) {
    return sde_sample_path(eta, sched, n_steps, dim, rng).back().x;
}

DenoiserField gaussian_denoiser(const InterpolantSchedule& sched, DenoiserTarget target) {
    return [sched, target](double t, const Tensor& x) {
        const double a = sched.alpha(t);
        const double b = sched.beta(t);
        const double num = target == DenoiserTarget::Data ? a : b;
        const double s = num / (a * a + b * b);
        Tensor out = x;
        for (int i = 0; i < out.size(); ++i) out[i] *= s;
        return out;
    };
}

namespace {
Tensor continuous_time_embedding(double t, int dim) {
    Tensor e({dim});
    const int half = dim / 2;
    for (int i = 0; i < half; ++i) {
        const double freq = std::pow(10.0, static_cast<double>(i));
        e[i] = std::sin(t * freq);
        e[half + i] = std::cos(t * freq);
    }
    return e;
}
}  // namespace

FlowDenoiserNet::FlowDenoiserNet(int dim, int hidden_dim, int n_hidden_layers, int time_embed_dim, Rng& rng)
    : dim_(dim), hidden_dim_(hidden_dim), n_hidden_layers_(n_hidden_layers), time_embed_dim_(time_embed_dim) {
    if (time_embed_dim % 2 != 0) throw std::invalid_argument("flow denoiser: time embed dim must be even");
    int fan_in = dim + time_embed_dim;
    for (int l = 0; l < n_hidden_layers; ++l) {
        Tensor w({hidden_dim, fan_in});
        const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (int i = 0; i < w.size(); ++i) w[i] = s * rng.normal();
        params_.push_back(std::move(w));
        params_.push_back(Tensor::zeros({hidden_dim}));
        fan_in = hidden_dim;
    }
    Tensor w({dim, fan_in});
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < w.size(); ++i) w[i] = s * rng.normal();
    params_.push_back(std::move(w));
    params_.push_back(Tensor::zeros({dim}));
}

Tensor FlowDenoiserNet::input_vector(double t, const Tensor& x) const {
    if (x.size() != dim_) throw std::invalid_argument("flow denoiser: input dim mismatch");
    Tensor in({dim_ + time_embed_dim_});
    int k = 0;
    for (int i = 0; i < x.size(); ++i) in[k++] = x[i];
    const Tensor te = continuous_time_embedding(t, time_embed_dim_);
    for (int i = 0; i < te.size(); ++i) in[k++] = te[i];
    return in;
}

Tensor FlowDenoiserNet::predict(double t, const Tensor& x) const {
    Tensor h = input_vector(t, x);
    for (int l = 0; l <= n_hidden_layers_; ++l) {
        const Tensor& w = params_[2 * static_cast<size_t>(l)];
        const Tensor& b = params_[2 * static_cast<size_t>(l) + 1];
        Tensor out({w.shape()[0]});
        for (int i = 0; i < w.shape()[0]; ++i) {
            double s = b[i];
            for (int j = 0; j < w.shape()[1]; ++j) s += w.at(i, j) * h[j];
            out[i] = l == n_hidden_layers_ ? s : std::tanh(s);
        }
        h = std::move(out);
    }
    return h;
}

NodeId FlowDenoiserNet::predict(Graph& g, const std::vector<NodeId>& param_nodes, double t,
                                const Tensor& x) const {
    if (param_nodes.size() != params_.size())
        throw std::invalid_argument("flow denoiser: param node count mismatch");
    NodeId h = g.leaf(input_vector(t, x));
    for (int l = 0; l <= n_hidden_layers_; ++l) {
        const NodeId w = param_nodes[2 * static_cast<size_t>(l)];
        const NodeId b = param_nodes[2 * static_cast<size_t>(l) + 1];
        h = g.add(g.matmul(w, h), b);
        if (l != n_hidden_layers_) h = g.tanh(h);
    }
    return h;
}

std::vector<NodeId> FlowDenoiserNet::insert_params(Graph& g, bool track) const {
    std::vector<NodeId> ids;
    ids.reserve(params_.size());
    for (const Tensor& p : params_) ids.push_back(g.leaf(p, track));
    return ids;
}

DenoiserField FlowDenoiserNet::as_field() const {
    return [this](double t, const Tensor& x) { return predict(t, x); };
}

double train_denoiser(FlowDenoiserNet& net, const std::vector<Tensor>& data,
                      const InterpolantSchedule& sched, DenoiserTarget target, int steps, int batch,
                      const AdamConfig& opt, Rng& rng) {
    if (data.empty()) throw std::invalid_argument("train_denoiser: empty data");
    Adam adam(opt, net.params());
    double tail_sum = 0.0;
    int tail_count = 0;
    const int tail_start = steps - std::max(1, steps / 10);
    for (int s = 0; s < steps; ++s) {
        Graph g;
        const std::vector<NodeId> ids = net.insert_params(g, true);
        NodeId total = g.constant(0.0);
        for (int b = 0; b < batch; ++b) {
            const Tensor& x1 = data[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(data.size()) - 1))];
            const Tensor z = rng.normal_tensor(x1.shape());
            const double t = rng.uniform(sched.t_lo, sched.t_hi);
            const double a = sched.alpha(t);
            const double bt = sched.beta(t);
            Tensor x_t = x1;
            for (int i = 0; i < x_t.size(); ++i) x_t[i] = a * x1[i] + bt * z[i];
            const Tensor& y = target == DenoiserTarget::Noise ? z : x1;
            const NodeId pred = net.predict(g, ids, t, x_t);
            total = g.add(total, g.sum(g.square(g.sub(g.leaf(y), pred))));
        }
        const NodeId loss = g.scale(total, 1.0 / batch);
        g.backward(loss);
        std::vector<Tensor> grads;
        grads.reserve(ids.size());
        for (NodeId id : ids) grads.push_back(g.grad(id));
        adam.step(net.params(), grads);
        if (s >= tail_start) {
            tail_sum += g.value(loss).item();
            ++tail_count;
        }
    }
    return tail_sum / tail_count;
}

}  // namespace prefdiff
