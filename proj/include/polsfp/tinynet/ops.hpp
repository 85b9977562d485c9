// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Differentiable operations on NCHW tensors. Each op checks shapes and throws
// ShapeMismatch on disagreement.

#pragma once

#include <span>
#include <vector>

#include "polsfp/tinynet/tensor.hpp"

namespace polsfp::tinynet {

/// Cross-correlation. input (N, C, H, W), weights (O, C, k, k), bias (O) or
/// undefined. Output spatial size is floor((H + 2 pad - k) / stride) + 1.
Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride = 1, int padding = 0);

/// Transposed convolution with a 2x2 kernel and stride 2. input (N, C, H, W),
/// weights (C, O, 2, 2), bias (O) or undefined; output (N, O, 2H, 2W).
Tensor upconv2x(const Tensor& input, const Tensor& weights, const Tensor& bias = {});

Tensor relu(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);

/// Concatenates two NCHW tensors along channels.
Tensor concat_channels(const Tensor& a, const Tensor& b);

Tensor sum(const Tensor& x);
Tensor sum_of_squares(const Tensor& x);

/// Mean over masked pixels of 1 - <p, n> / max(|p|, eps). pred (N, 3, H, W),
/// target (N, 3, H, W) unit on the mask, mask has N*H*W entries (nonzero =
/// foreground). Throws EmptyMask when no pixel is selected.
Tensor cosine_loss(const Tensor& pred, const Tensor& target, std::span<const std::uint8_t> mask,
                   double eps = 1e-8);

}  // namespace polsfp::tinynet
