// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/tinynet/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#include "polsfp/error.hpp"

namespace polsfp::tinynet {

std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw Error(ErrorCode::ShapeMismatch, "negative dimension in " + shape_string(shape));
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

std::string shape_string(const Shape& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

std::vector<double>& Node::grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
}

Tensor::Tensor(Shape shape, double fill, bool requires_grad) : node_(std::make_shared<Node>()) {
    node_->value.assign(shape_size(shape), fill);
    node_->shape = std::move(shape);
    node_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) : node_(std::make_shared<Node>()) {
    if (values.size() != shape_size(shape))
        throw Error(ErrorCode::ShapeMismatch, "value count " + std::to_string(values.size()) + " does not match shape " +
                                                  shape_string(shape));
    node_->shape = std::move(shape);
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
}

double Tensor::item() const {
    if (size() != 1) throw Error(ErrorCode::ShapeMismatch, "item() on a tensor of shape " + shape_string(shape()));
    return node_->value[0];
}

void Tensor::zero_grad() { node_->grad.clear(); }

Tensor Tensor::detach() const { return Tensor(node_->shape, node_->value, false); }

Tensor Tensor::make_result(Shape shape, std::vector<double> values, const std::vector<Tensor>& inputs,
                           std::function<void(Node&)> backward_fn) {
    Tensor out(std::move(shape), std::move(values));
    bool needs = false;
    for (const auto& in : inputs) needs = needs || (in.defined() && in.requires_grad());
    if (needs) {
        out.node_->requires_grad = true;
        for (const auto& in : inputs)
            if (in.defined()) out.node_->parents.push_back(in.node_);
        out.node_->backward_fn = std::move(backward_fn);
    }
    return out;
}

void Tensor::backward() {
    if (size() != 1) throw Error(ErrorCode::ShapeMismatch, "backward() needs a scalar, got " + shape_string(shape()));
    if (!requires_grad()) return;

    // Iterative post-order DFS gives a topological order without recursion.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
    visited.insert(node_.get());
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->parents.size()) {
            Node* p = n->parents[next++].get();
            if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }

    node_->grad_buffer()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
    }
}

}  // namespace polsfp::tinynet
