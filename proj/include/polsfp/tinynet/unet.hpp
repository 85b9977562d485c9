// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// U-Net with a residual-block encoder.
//
//   stem:     3x3 conv in -> w1, ReLU                          (full resolution)
//   stage s:  residual blocks, the first one stride 2           (1 / 2^s)
//             widths w1, w1, 2 w1, 4 w1, ...
//   decoder:  per level, 2x2 up-convolution halving channels, concatenation
//             with the encoder feature at that resolution, two 3x3 convs
//   head:     3x3 conv to out_channels, linear

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polsfp/tinynet/tensor.hpp"

namespace polsfp::tinynet {

struct UNetConfig {
    int depth = 3;
    int base_width = 8;
    int in_channels = 4;
    int out_channels = 3;
    int blocks_per_stage = 1;
    double l2_factor = 1e-4;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
    int stage_width(int stage) const;  // stage in [1, depth]
    int patch_multiple() const { return 1 << depth; }
};

struct NamedParam {
    std::string name;
    Tensor tensor;
    bool conv_weight = false;  // participates in the L2 penalty
};

/// Weights of one residual block: H(x) = relu(skip(x) + F(x)) with
/// F = conv3x3 -> relu -> conv3x3 and skip the identity or a 1x1 projection.
struct ResidualParams {
    Tensor conv1_w, conv1_b, conv2_w, conv2_b;
    Tensor proj_w, proj_b;  // undefined for an identity skip
    int stride = 1;
};

Tensor residual_block(const Tensor& x, const ResidualParams& params);

class UNet {
public:
    /// Fan-in scaled uniform initialization from config.seed: U(-a, a) with
    /// a = sqrt(6 / fan_in) for rectified layers and sqrt(3 / fan_in) for the
    /// linear head; biases start at zero.
    explicit UNet(const UNetConfig& config);

    const UNetConfig& config() const { return config_; }
    std::vector<NamedParam>& params() { return params_; }
    const std::vector<NamedParam>& params() const { return params_; }
    Tensor& param(const std::string& name);

    /// input (N, in_channels, H, W) with H and W divisible by 2^depth.
    Tensor forward(const Tensor& input) const;

    /// l2_factor * sum of squared conv weights (biases excluded).
    Tensor l2_penalty() const;

    void set_requires_grad(bool on);
    void zero_grad();

    /// Deep copy of parameter values (no shared storage).
    UNet clone() const;

private:
    struct Stage {
        std::vector<ResidualParams> blocks;
    };
    struct Level {
        Tensor up_w, up_b, conv1_w, conv1_b, conv2_w, conv2_b;
    };

    Tensor& add_param(const std::string& name, Shape shape, bool conv_weight);

    UNetConfig config_;
    std::vector<NamedParam> params_;
    Tensor stem_w_, stem_b_;
    std::vector<Stage> stages_;
    std::vector<Level> levels_;  // index 0 = deepest
    Tensor head_w_, head_b_;
};

}  // namespace polsfp::tinynet
