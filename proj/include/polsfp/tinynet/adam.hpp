// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "polsfp/tinynet/tensor.hpp"

namespace polsfp::tinynet {

struct AdamState {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step = 0;
    std::vector<std::vector<double>> m;  // one slot per parameter tensor
    std::vector<std::vector<double>> v;
};

/// One bias-corrected Adam update of every tensor in `params` from its
/// accumulated gradient (a missing gradient counts as zero). Slot shapes are
/// created on the first call and checked afterwards.
void adam_step(AdamState& state, std::vector<Tensor>& params);

}  // namespace polsfp::tinynet
