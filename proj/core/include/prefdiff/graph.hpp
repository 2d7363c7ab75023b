#pragma once

#include <functional>
#include <vector>

#include "prefdiff/tensor.hpp"

namespace prefdiff {

enum class Op {
    Leaf,
    MatMul,
    Add,
    Mul,
    Scale,
    Tanh,
    Sigmoid,
    LogSigmoid,
    Square,
    Exp,
    Clip,
    Sum,
    Mean,
};

using NodeId = int;

// Reverse-mode tape over a fixed primitive set. Values are computed eagerly
// as nodes are appended, so the node order is already topological; backward()
// runs one reverse sweep. Shape mismatches are rejected when the node is
// built, before anything is evaluated.
class Graph {
public:
    NodeId leaf(Tensor value, bool track = false);
    NodeId constant(double v) { return leaf(Tensor::scalar(v), false); }

    // (m,n)x(n,k) -> (m,k) and (m,n)x(n) -> (m).
    NodeId matmul(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);       // same shape, elementwise
    NodeId mul(NodeId a, NodeId b);       // same shape, elementwise
    NodeId scale(NodeId a, double s);
    NodeId tanh(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId log_sigmoid(NodeId a);
    NodeId square(NodeId a);
    NodeId exp(NodeId a);
    NodeId clip(NodeId a, double lo, double hi);
    NodeId sum(NodeId a);                 // scalar
    NodeId mean(NodeId a);                // scalar

    NodeId sub(NodeId a, NodeId b) { return add(a, scale(b, -1.0)); }

    const Tensor& value(NodeId id) const { return node(id).value; }
    const Tensor& grad(NodeId id) const;
    // True after backward() for tracked nodes the loss actually depends on;
    // a tracked node with no path to the loss has gradient zero and no
    // buffer.
    bool has_grad(NodeId id) const { return node(id).has_grad; }
    bool tracked(NodeId id) const { return node(id).track; }
    int size() const { return static_cast<int>(nodes_.size()); }

    // Reverse sweep from a scalar loss node; clears earlier gradients.
    // Gradients are accumulated only along tracked paths.
    void backward(NodeId loss);

private:
    struct Node {
        Op op = Op::Leaf;
        NodeId a = -1;
        NodeId b = -1;
        double c0 = 0.0;  // scale factor / clip lower bound
        double c1 = 0.0;  // clip upper bound
        Tensor value;
        Tensor grad;
        bool track = false;
        bool has_grad = false;
    };

    const Node& node(NodeId id) const;
    Node& node(NodeId id);
    NodeId push(Node n);
    NodeId unary(Op op, NodeId a, double c0 = 0.0, double c1 = 0.0);
    void accumulate(NodeId id, const Tensor& g);

    std::vector<Node> nodes_;
};

// Maximum deviation between analytic gradients and central finite
// differences over every element of every parameter. Elements where both
// gradients are near zero are compared absolutely instead of relatively.
struct GradCheckReport {
    double max_dev = 0.0;
    int worst_param = -1;
    int worst_index = -1;
};

using GraphBuilder = std::function<NodeId(Graph&, const std::vector<NodeId>&)>;

// build(graph, param_nodes) must append a scalar loss and return its id;
// param_nodes holds one tracked leaf per entry of params, in order.
GradCheckReport grad_check(const GraphBuilder& build, std::vector<Tensor>& params, double h);

}  // namespace prefdiff
