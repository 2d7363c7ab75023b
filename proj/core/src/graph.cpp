#include "prefdiff/graph.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "prefdiff/mathutil.hpp"

namespace prefdiff {

const Graph::Node& Graph::node(NodeId id) const {
    if (id < 0 || id >= size()) throw std::invalid_argument("graph: bad node id " + std::to_string(id));
    return nodes_[static_cast<size_t>(id)];
}

Graph::Node& Graph::node(NodeId id) { return const_cast<Node&>(static_cast<const Graph*>(this)->node(id)); }

NodeId Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::leaf(Tensor value, bool track) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    n.track = track;
    return push(std::move(n));
}

NodeId Graph::matmul(NodeId a, NodeId b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.value.rank() != 2 || nb.value.rank() < 1 || nb.value.rank() > 2)
        throw std::invalid_argument("matmul: expects (m,n)x(n,k) or (m,n)x(n)");
    const int m = na.value.shape()[0];
    const int inner = na.value.shape()[1];
    const bool vec = nb.value.rank() == 1;
    const int k = vec ? 1 : nb.value.shape()[1];
    if (nb.value.shape()[0] != inner)
        throw std::invalid_argument("matmul: inner dimensions disagree, " + na.value.shape_str() + " x " +
                                    nb.value.shape_str());

    Node n;
    n.op = Op::MatMul;
    n.a = a;
    n.b = b;
    n.track = na.track || nb.track;
    n.value = vec ? Tensor({m}) : Tensor({m, k});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) {
            double s = 0.0;
            for (int p = 0; p < inner; ++p) s += na.value[i * inner + p] * nb.value[p * k + j];
            n.value[i * k + j] = s;
        }
    return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (!na.value.same_shape(nb.value))
        throw std::invalid_argument("add: shape mismatch " + na.value.shape_str() + " vs " + nb.value.shape_str());
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.track = na.track || nb.track;
    n.value = na.value;
    for (int i = 0; i < n.value.size(); ++i) n.value[i] += nb.value[i];
    return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (!na.value.same_shape(nb.value))
        throw std::invalid_argument("mul: shape mismatch " + na.value.shape_str() + " vs " + nb.value.shape_str());
    Node n;
    n.op = Op::Mul;
    n.a = a;
    n.b = b;
    n.track = na.track || nb.track;
    n.value = na.value;
    for (int i = 0; i < n.value.size(); ++i) n.value[i] *= nb.value[i];
    return push(std::move(n));
}

NodeId Graph::unary(Op op, NodeId a, double c0, double c1) {
    const Node& na = node(a);
    Node n;
    n.op = op;
    n.a = a;
    n.c0 = c0;
    n.c1 = c1;
    n.track = na.track;
    switch (op) {
        case Op::Scale: {
            n.value = na.value;
            for (int i = 0; i < n.value.size(); ++i) n.value[i] *= c0;
            break;
        }
        case Op::Tanh: {
            n.value = na.value;
            for (int i = 0; i < n.value.size(); ++i) n.value[i] = std::tanh(n.value[i]);
            break;
        }
        case Op::Sigmoid: {
            n.value = na.value;
            for (int i = 0; i < n.value.size(); ++i) n.value[i] = prefdiff::sigmoid(n.value[i]);
            break;
        }
        case Op::LogSigmoid: {
            n.value = na.value;
            for (int i = 0; i < n.value.size(); ++i) n.value[i] = prefdiff::log_sigmoid(n.value[i]);
            break;
        }
        case Op::Square: {
            n.value = na.value;
            for (int i = 0; i < n.value.size(); ++i) n.value[i] *= n.value[i];
            break;
        }
        case Op::Exp: {
            n.value = na.value;
            for (int i = 0; i < n.value.size(); ++i) n.value[i] = std::exp(n.value[i]);
            break;
        }
        case Op::Clip: {
            if (c0 > c1) throw std::invalid_argument("clip: lo > hi");
            n.value = na.value;
            for (int i = 0; i < n.value.size(); ++i) n.value[i] = clip_scalar(n.value[i], c0, c1);
            break;
        }
        case Op::Sum: {
            double s = 0.0;
            for (int i = 0; i < na.value.size(); ++i) s += na.value[i];
            n.value = Tensor::scalar(s);
            break;
        }
        case Op::Mean: {
            double s = 0.0;
            for (int i = 0; i < na.value.size(); ++i) s += na.value[i];
            n.value = Tensor::scalar(s / na.value.size());
            break;
        }
        default:
            throw std::invalid_argument("graph: bad unary op");
    }
    return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double s) { return unary(Op::Scale, a, s); }
NodeId Graph::tanh(NodeId a) { return unary(Op::Tanh, a); }
NodeId Graph::sigmoid(NodeId a) { return unary(Op::Sigmoid, a); }
NodeId Graph::log_sigmoid(NodeId a) { return unary(Op::LogSigmoid, a); }
NodeId Graph::square(NodeId a) { return unary(Op::Square, a); }
NodeId Graph::exp(NodeId a) { return unary(Op::Exp, a); }
NodeId Graph::clip(NodeId a, double lo, double hi) { return unary(Op::Clip, a, lo, hi); }
NodeId Graph::sum(NodeId a) { return unary(Op::Sum, a); }
NodeId Graph::mean(NodeId a) { return unary(Op::Mean, a); }

const Tensor& Graph::grad(NodeId id) const {
    const Node& n = node(id);
    if (!n.has_grad) throw std::runtime_error("graph: no gradient for node " + std::to_string(id));
    return n.grad;
}

void Graph::accumulate(NodeId id, const Tensor& g) {
    Node& n = node(id);
    if (!n.track) return;
    if (!n.has_grad) {
        n.grad = Tensor::zeros(n.value.shape());
        n.has_grad = true;
    }
    for (int i = 0; i < g.size(); ++i) n.grad[i] += g[i];
}

void Graph::backward(NodeId loss) {
    Node& top = node(loss);
    if (top.value.size() != 1) throw std::invalid_argument("backward: loss node must be scalar");
    for (Node& n : nodes_) {
        n.has_grad = false;
        n.grad = Tensor();
    }
    if (!top.track) return;  // nothing depends on a tracked leaf
    top.grad = Tensor::full(top.value.shape(), 1.0);
    top.has_grad = true;

    for (NodeId id = loss; id >= 0; --id) {
        Node& n = node(id);
        if (!n.has_grad || n.op == Op::Leaf) continue;
        const Tensor& g = n.grad;
        switch (n.op) {
            case Op::MatMul: {
                const Node& na = node(n.a);
                const Node& nb = node(n.b);
                const int m = na.value.shape()[0];
                const int inner = na.value.shape()[1];
                const int k = nb.value.rank() == 1 ? 1 : nb.value.shape()[1];
                if (na.track) {
                    Tensor ga = Tensor::zeros(na.value.shape());
                    for (int i = 0; i < m; ++i)
                        for (int p = 0; p < inner; ++p) {
                            double s = 0.0;
                            for (int j = 0; j < k; ++j) s += g[i * k + j] * nb.value[p * k + j];
                            ga[i * inner + p] = s;
                        }
                    accumulate(n.a, ga);
                }
                if (nb.track) {
                    Tensor gb = Tensor::zeros(nb.value.shape());
                    for (int p = 0; p < inner; ++p)
                        for (int j = 0; j < k; ++j) {
                            double s = 0.0;
                            for (int i = 0; i < m; ++i) s += na.value[i * inner + p] * g[i * k + j];
                            gb[p * k + j] = s;
                        }
                    accumulate(n.b, gb);
                }
                break;
            }
            case Op::Add:
                accumulate(n.a, g);
                accumulate(n.b, g);
                break;
            case Op::Mul: {
                const Node& na = node(n.a);
                const Node& nb = node(n.b);
                if (na.track) {
                    Tensor ga = g;
                    for (int i = 0; i < ga.size(); ++i) ga[i] *= nb.value[i];
                    accumulate(n.a, ga);
                }
                if (nb.track) {
                    Tensor gb = g;
                    for (int i = 0; i < gb.size(); ++i) gb[i] *= na.value[i];
                    accumulate(n.b, gb);
                }
                break;
            }
            case Op::Scale: {
                Tensor ga = g;
                for (int i = 0; i < ga.size(); ++i) ga[i] *= n.c0;
                accumulate(n.a, ga);
                break;
            }
            case Op::Tanh: {
                Tensor ga = g;
                for (int i = 0; i < ga.size(); ++i) ga[i] *= 1.0 - n.value[i] * n.value[i];
                accumulate(n.a, ga);
                break;
            }
            case Op::Sigmoid: {
                Tensor ga = g;
                for (int i = 0; i < ga.size(); ++i) ga[i] *= n.value[i] * (1.0 - n.value[i]);
                accumulate(n.a, ga);
                break;
            }
            case Op::LogSigmoid: {
                const Node& na = node(n.a);
                Tensor ga = g;
                for (int i = 0; i < ga.size(); ++i) ga[i] *= prefdiff::sigmoid(-na.value[i]);
                accumulate(n.a, ga);
                break;
            }
            case Op::Square: {
                const Node& na = node(n.a);
                Tensor ga = g;
                for (int i = 0; i < ga.size(); ++i) ga[i] *= 2.0 * na.value[i];
                accumulate(n.a, ga);
                break;
            }
            case Op::Exp: {
                Tensor ga = g;
                for (int i = 0; i < ga.size(); ++i) ga[i] *= n.value[i];
                accumulate(n.a, ga);
                break;
            }
            case Op::Clip: {
                const Node& na = node(n.a);
                Tensor ga = g;
                for (int i = 0; i < ga.size(); ++i) {
                    const double x = na.value[i];
                    if (x < n.c0 || x > n.c1) ga[i] = 0.0;
                }
                accumulate(n.a, ga);
                break;
            }
            case Op::Sum: {
                const Node& na = node(n.a);
                accumulate(n.a, Tensor::full(na.value.shape(), g[0]));
                break;
            }
            case Op::Mean: {
                const Node& na = node(n.a);
                accumulate(n.a, Tensor::full(na.value.shape(), g[0] / na.value.size()));
                break;
            }
            case Op::Leaf:
                break;
        }
    }
}

GradCheckReport grad_check(const GraphBuilder& build, std::vector<Tensor>& params, double h) {
    if (h <= 0.0) throw std::invalid_argument("grad_check: h must be positive");

    auto eval = [&](bool want_grads, std::vector<Tensor>* grads) -> double {
        Graph g;
        std::vector<NodeId> ids;
        ids.reserve(params.size());
        for (const Tensor& p : params) ids.push_back(g.leaf(p, want_grads));
        const NodeId loss = build(g, ids);
        if (want_grads) {
            g.backward(loss);
            grads->clear();
            for (size_t i = 0; i < params.size(); ++i) {
                if (g.has_grad(ids[i]))
                    grads->push_back(g.grad(ids[i]));
                else
                    grads->push_back(Tensor::zeros(params[i].shape()));
            }
        }
        return g.value(loss).item();
    };

    std::vector<Tensor> analytic;
    eval(true, &analytic);

    GradCheckReport report;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        for (int i = 0; i < params[pi].size(); ++i) {
            const double orig = params[pi][i];
            params[pi][i] = orig + h;
            const double up = eval(false, nullptr);
            params[pi][i] = orig - h;
            const double dn = eval(false, nullptr);
            params[pi][i] = orig;

            const double numeric = (up - dn) / (2.0 * h);
            const double a = analytic[pi][i];
            const double denom = std::max(std::abs(a), std::abs(numeric));
            const double dev = denom < 1e-6 ? std::abs(a - numeric) : std::abs(a - numeric) / denom;
            if (dev > report.max_dev) {
                report.max_dev = dev;
                report.worst_param = static_cast<int>(pi);
                report.worst_index = i;
            }
        }
    }
    return report;
}

}  // namespace prefdiff
