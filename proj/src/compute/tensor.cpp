// SPDX-License-Identifier: Apache-2.0
#include "adaret/compute/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

ADARET_BEGIN_NAMESPACE
namespace compute {

namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

std::string to_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, std::vector<Real> values, bool requires_grad) : node_(std::make_shared<Node>()) {
    if (compute::numel(shape) != values.size()) {
        throw ShapeError("tensor shape " + to_string(shape) + " does not match " + std::to_string(values.size()) +
                         " values");
    }
    node_->shape = std::move(shape);
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), Real(0), requires_grad); }

Tensor Tensor::full(Shape shape, Real value, bool requires_grad) {
    const auto n = compute::numel(shape);
    return Tensor(std::move(shape), std::vector<Real>(n, value), requires_grad);
}

Tensor Tensor::scalar(Real value, bool requires_grad) { return Tensor({}, {value}, requires_grad); }

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= rank()) throw ShapeError("axis " + std::to_string(axis) + " out of range for " + to_string(shape()));
    return node_->shape[axis];
}

std::span<Real> Tensor::grad_mut() {
    node_->ensure_grad();
    return node_->grad;
}

void Tensor::zero_grad() { node_->grad.assign(node_->value.size(), Real(0)); }

Real Tensor::item() const {
    if (numel() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
    return node_->value[0];
}

Tensor Tensor::detach() const { return Tensor(node_->shape, node_->value, false); }

Tensor make_result(Shape shape, std::vector<Real> values, std::vector<Tensor> parents,
                   std::function<void(Node&)> backward_fn, const char* op) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->op = op;
    bool needs = false;
    if (g_grad_enabled) {
        for (const auto& p : parents) needs = needs || p.requires_grad();
    }
    if (needs) {
        node->requires_grad = true;
        node->parents.reserve(parents.size());
        for (auto& p : parents) node->parents.push_back(p.ptr());
        node->backward = std::move(backward_fn);
    }
    return Tensor(std::move(node));
}

void backward(const Tensor& loss) {
    if (!loss.defined() || loss.numel() != 1) {
        throw ShapeError("backward requires a scalar loss");
    }
    Node* root = loss.node();
    if (!root->requires_grad) return;

    // Iterative post-order DFS gives a topological order without deep recursion.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
    seen.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad[0] += Real(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backward && !node->grad.empty()) node->backward(*node);
    }
}

std::vector<std::vector<Real>> gradients(const Tensor& loss, std::span<const Tensor> params) {
    for (auto p : params) p.zero_grad();
    backward(loss);
    std::vector<std::vector<Real>> out;
    out.reserve(params.size());
    for (const auto& p : params) {
        auto g = p.grad();
        out.emplace_back(g.begin(), g.end());
        out.back().resize(p.numel(), Real(0));
    }
    return out;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

void require_shape(const Tensor& t, const Shape& expected, const char* what) {
    if (t.shape() != expected) {
        throw ShapeError(std::string(what) + ": expected shape " + to_string(expected) + ", got " +
                         to_string(t.shape()));
    }
}

void require_finite(std::span<const Real> values, const char* what) {
    for (auto v : values) {
        if (!std::isfinite(v)) throw DivergedError(std::string(what) + ": diverged (non-finite value)");
    }
}

}  // namespace compute
ADARET_END_NAMESPACE
