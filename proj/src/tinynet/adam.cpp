// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/tinynet/adam.hpp"

#include <cmath>

#include "polsfp/error.hpp"

namespace polsfp::tinynet {

void adam_step(AdamState& state, std::vector<Tensor>& params) {
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.size(), 0.0);
            state.v.emplace_back(p.size(), 0.0);
        }
    }
    if (state.m.size() != params.size()) throw Error(ErrorCode::ShapeMismatch, "Adam slot count differs from parameters");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);

    for (std::size_t i = 0; i < params.size(); ++i) {
        auto values = params[i].values();
        const auto grad = params[i].grad();
        auto& m = state.m[i];
        auto& v = state.v[i];
        if (m.size() != values.size()) throw Error(ErrorCode::ShapeMismatch, "Adam slot shape differs from parameter");
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double g = grad.empty() ? 0.0 : grad[k];
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g;
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g * g;
            const double m_hat = m[k] / c1;
            const double v_hat = v[k] / c2;
            values[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

}  // namespace polsfp::tinynet
