// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// A small reverse-mode autodiff tensor. Every op result keeps shared handles
// to its inputs and a closure that scatters its gradient back into them;
// Tensor::backward walks that graph in reverse topological order.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace polsfp::tinynet {

using Shape = std::vector<int>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // empty until first accumulated into
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    /// Gradient buffer, zero-filled on first use.
    std::vector<double>& grad_buffer();
};

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0, bool requires_grad = false);
    Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    int dim(std::size_t i) const { return node_->shape[i]; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t size() const { return node_->value.size(); }

    std::span<double> values() { return node_->value; }
    std::span<const double> values() const { return node_->value; }
    double item() const;

    /// Empty span when no gradient has been accumulated.
    std::span<const double> grad() const { return node_->grad; }
    std::span<double> mutable_grad() { return node_->grad_buffer(); }
    void zero_grad();

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool on) { node_->requires_grad = on; }

    /// Seeds d(this)/d(this) = 1 for a scalar and accumulates gradients into
    /// every reachable tensor that requires them.
    void backward();

    /// Copy of the values without graph history.
    Tensor detach() const;

    const std::shared_ptr<Node>& node() const { return node_; }

    /// Result tensor of an op; requires_grad is inherited from the inputs.
    static Tensor make_result(Shape shape, std::vector<double> values, const std::vector<Tensor>& inputs,
                              std::function<void(Node&)> backward_fn);

private:
    std::shared_ptr<Node> node_;
};

}  // namespace polsfp::tinynet
