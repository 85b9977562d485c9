// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/tinynet/unet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polsfp/error.hpp"
#include "polsfp/tinynet/ops.hpp"

namespace polsfp::tinynet {

void UNetConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
    if (depth < 2 || depth > 8) fail("depth must lie in [2, 8]");
    if (base_width < 1) fail("base_width must be >= 1");
    if (in_channels < 1 || out_channels < 1) fail("channel counts must be >= 1");
    if (blocks_per_stage < 1) fail("blocks_per_stage must be >= 1");
    if (!(l2_factor >= 0.0)) fail("l2_factor must be >= 0");
}

int UNetConfig::stage_width(int stage) const { return stage <= 2 ? base_width : base_width << (stage - 2); }

Tensor residual_block(const Tensor& x, const ResidualParams& p) {
    Tensor f = conv2d(x, p.conv1_w, p.conv1_b, p.stride, 1);
    f = conv2d(relu(f), p.conv2_w, p.conv2_b, 1, 1);
    const Tensor skip = p.proj_w.defined() ? conv2d(x, p.proj_w, p.proj_b, p.stride, 0) : x;
    return relu(add(skip, f));
}

Tensor& UNet::add_param(const std::string& name, Shape shape, bool conv_weight) {
    params_.push_back({name, Tensor(std::move(shape), 0.0, true), conv_weight});
    return params_.back().tensor;
}

UNet::UNet(const UNetConfig& config) : config_(config) {
    config_.validate();
    const int w1 = config_.base_width;
    params_.reserve(64);

    stem_w_ = add_param("stem.w", {w1, config_.in_channels, 3, 3}, true);
    stem_b_ = add_param("stem.b", {w1}, false);

    int in_ch = w1;
    for (int s = 1; s <= config_.depth; ++s) {
        Stage stage;
        const int out_ch = config_.stage_width(s);
        for (int b = 0; b < config_.blocks_per_stage; ++b) {
            const std::string prefix = "stage" + std::to_string(s) + ".block" + std::to_string(b) + ".";
            ResidualParams rp;
            rp.stride = b == 0 ? 2 : 1;
            rp.conv1_w = add_param(prefix + "conv1.w", {out_ch, in_ch, 3, 3}, true);
            rp.conv1_b = add_param(prefix + "conv1.b", {out_ch}, false);
            rp.conv2_w = add_param(prefix + "conv2.w", {out_ch, out_ch, 3, 3}, true);
            rp.conv2_b = add_param(prefix + "conv2.b", {out_ch}, false);
            if (rp.stride != 1 || in_ch != out_ch) {
                rp.proj_w = add_param(prefix + "proj.w", {out_ch, in_ch, 1, 1}, true);
                rp.proj_b = add_param(prefix + "proj.b", {out_ch}, false);
            }
            stage.blocks.push_back(rp);
            in_ch = out_ch;
        }
        stages_.push_back(std::move(stage));
    }

    int cur = in_ch;
    for (int lvl = config_.depth - 1; lvl >= 0; --lvl) {
        const int skip_ch = lvl == 0 ? w1 : config_.stage_width(lvl);
        const int up_ch = std::max(1, cur / 2);
        const std::string prefix = "dec" + std::to_string(lvl) + ".";
        Level l;
        l.up_w = add_param(prefix + "up.w", {cur, up_ch, 2, 2}, true);
        l.up_b = add_param(prefix + "up.b", {up_ch}, false);
        l.conv1_w = add_param(prefix + "conv1.w", {skip_ch, up_ch + skip_ch, 3, 3}, true);
        l.conv1_b = add_param(prefix + "conv1.b", {skip_ch}, false);
        l.conv2_w = add_param(prefix + "conv2.w", {skip_ch, skip_ch, 3, 3}, true);
        l.conv2_b = add_param(prefix + "conv2.b", {skip_ch}, false);
        levels_.push_back(l);
        cur = skip_ch;
    }
    head_w_ = add_param("head.w", {config_.out_channels, cur, 3, 3}, true);
    head_b_ = add_param("head.b", {config_.out_channels}, false);

    std::mt19937_64 rng(config_.seed);
    for (auto& p : params_) {
        if (!p.conv_weight) continue;
        const Shape& s = p.tensor.shape();
        const bool transposed = p.name.find(".up.") != std::string::npos;
        const double fan_in = transposed ? s[0] : static_cast<double>(s[1]) * s[2] * s[3];
        const double gain = p.name == "head.w" ? 3.0 : 6.0;
        std::uniform_real_distribution<double> dist(-std::sqrt(gain / fan_in), std::sqrt(gain / fan_in));
        for (double& v : p.tensor.values()) v = dist(rng);
    }
}

Tensor& UNet::param(const std::string& name) {
    for (auto& p : params_)
        if (p.name == name) return p.tensor;
    throw Error(ErrorCode::ConfigError, "no parameter named '" + name + "'");
}

Tensor UNet::forward(const Tensor& input) const {
    if (!input.defined() || input.rank() != 4)
        throw Error(ErrorCode::ShapeMismatch, "U-Net input must be NCHW");
    if (input.dim(1) != config_.in_channels)
        throw Error(ErrorCode::ShapeMismatch, "U-Net expects " + std::to_string(config_.in_channels) +
                                                  " input channels, got " + std::to_string(input.dim(1)));
    const int m = config_.patch_multiple();
    if (input.dim(2) % m != 0 || input.dim(3) % m != 0)
        throw Error(ErrorCode::ConfigError, "input size " + shape_string(input.shape()) + " is not divisible by " +
                                                std::to_string(m));

    std::vector<Tensor> skips;
    Tensor x = relu(conv2d(input, stem_w_, stem_b_, 1, 1));
    skips.push_back(x);
    for (const auto& stage : stages_) {
        for (const auto& block : stage.blocks) x = residual_block(x, block);
        skips.push_back(x);
    }
    // skips[d] is the encoder output at 1 / 2^d; the deepest is the bottleneck.
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        const Level& l = levels_[i];
        const std::size_t lvl = levels_.size() - 1 - i;
        Tensor up = upconv2x(x, l.up_w, l.up_b);
        x = concat_channels(up, skips[lvl]);
        x = relu(conv2d(x, l.conv1_w, l.conv1_b, 1, 1));
        x = relu(conv2d(x, l.conv2_w, l.conv2_b, 1, 1));
    }
    return conv2d(x, head_w_, head_b_, 1, 1);
}

Tensor UNet::l2_penalty() const {
    Tensor total;
    for (const auto& p : params_) {
        if (!p.conv_weight) continue;
        Tensor sq = sum_of_squares(p.tensor);
        total = total.defined() ? add(total, sq) : sq;
    }
    return scale(total, config_.l2_factor);
}

void UNet::set_requires_grad(bool on) {
    for (auto& p : params_) p.tensor.set_requires_grad(on);
}

void UNet::zero_grad() {
    for (auto& p : params_) p.tensor.zero_grad();
}

UNet UNet::clone() const {
    UNet copy(config_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto src = params_[i].tensor.values();
        auto dst = copy.params_[i].tensor.values();
        std::copy(src.begin(), src.end(), dst.begin());
        copy.params_[i].tensor.set_requires_grad(params_[i].tensor.requires_grad());
    }
    return copy;
}

}  // namespace polsfp::tinynet
