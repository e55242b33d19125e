// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adaret/common.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

enum class Mode { train, eval };

/// One record of the dynamic computation graph. Leaves are parameters or
/// constants; interior nodes remember their parents and how to push their
/// gradient back into them.
struct Node {
    Shape shape;
    std::vector<Real> value;
    std::vector<Real> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;
    const char* op = "leaf";

    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), Real(0));
    }
};

/// Dense row-major tensor with reverse-mode autodiff. Copies share the
/// underlying node (handle semantics, like most tensor libraries).
class Tensor {
   public:
    Tensor() = default;
    Tensor(Shape shape, std::vector<Real> values, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, Real value, bool requires_grad = false);
    static Tensor scalar(Real value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t numel() const { return node_->value.size(); }

    std::span<const Real> data() const { return node_->value; }
    /// Direct write access, for parameter updates and test fixtures.
    std::span<Real> data_mut() { return node_->value; }
    /// Empty span when no gradient has been accumulated.
    std::span<const Real> grad() const { return node_->grad; }
    std::span<Real> grad_mut();
    void zero_grad();

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool on) { node_->requires_grad = on; }

    Real item() const;
    Real operator[](std::size_t flat) const { return node_->value[flat]; }

    /// Value copy with no graph history.
    Tensor detach() const;

    Node* node() const { return node_.get(); }
    const std::shared_ptr<Node>& ptr() const { return node_; }

   private:
    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
    friend Tensor make_result(Shape, std::vector<Real>, std::vector<Tensor>, std::function<void(Node&)>,
                              const char*);

    std::shared_ptr<Node> node_;
};

/// A parameter tensor with a stable name (checkpoint key).
struct NamedTensor {
    std::string name;
    Tensor tensor;
};
using ParamList = std::vector<NamedTensor>;

/// Build an op result. The backward closure is kept only when gradient
/// recording is enabled and at least one parent requires a gradient.
Tensor make_result(Shape shape, std::vector<Real> values, std::vector<Tensor> parents,
                   std::function<void(Node&)> backward, const char* op);

/// Reverse-mode sweep from a scalar loss. Gradients accumulate into every
/// reachable node that requires one; callers zero parameter grads first.
void backward(const Tensor& loss);

/// Zero the given parameters' grads, run backward, and return a copy of each
/// parameter's gradient (zeros for parameters the loss does not reach).
std::vector<std::vector<Real>> gradients(const Tensor& loss, std::span<const Tensor> params);

bool grad_enabled();

/// Disables graph recording in its scope (inference and scoring paths).
class NoGradGuard {
   public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

   private:
    bool previous_;
};

void require_shape(const Tensor& t, const Shape& expected, const char* what);
void require_finite(std::span<const Real> values, const char* what);

}  // namespace compute
ADARET_END_NAMESPACE
