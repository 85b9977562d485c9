// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Classical shape-from-polarization: sinusoid fit, zenith inversion and an
// explicit azimuth disambiguation policy.

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "polsfp/fresnel.hpp"
#include "polsfp/normal_map.hpp"
#include "polsfp/polcore.hpp"

namespace polsfp {

/// Picks the candidate closest to a reference field (upper-bound evaluation).
struct OraclePolicy {
    NormalMap reference;
};

/// Outward-normal assumption for a convex object centred at (cx, cy).
struct ConvexityPolicy {
    double cx = 0.0;
    double cy = 0.0;
    bool sub_brewster = true;  // specular: prefer the smaller zenith root
};

/// Always candidate[index mod count].
struct FixedBranchPolicy {
    std::size_t index = 0;
};

using DisambiguationPolicy = std::variant<OraclePolicy, ConvexityPolicy, FixedBranchPolicy>;

struct ReconstructionReport {
    NormalMap normal_map;
    double clamped_fraction = 0.0;
    double invalid_fraction = 0.0;
    std::vector<std::uint8_t> candidate_counts;
    std::vector<std::uint8_t> invalid;  // per pixel: fit failed or phase undefined
};

/// Selected zenith/azimuth are snapped to multiples of kAngleQuantum before
/// conversion, which makes the output independent of the intensity scale
/// beyond floating-point roundoff.
inline constexpr double kAngleQuantum = 1.0 / 16777216.0;  // 2^-24 rad

std::size_t select_candidate(const PixelCandidates& candidates, int y, int x, const DisambiguationPolicy& policy);

/// Throws DimensionMismatch or EmptyMask.
ReconstructionReport reconstruct_physics(const PolarizedStack& stack, const Mask& mask, const Material& material,
                                         const DisambiguationPolicy& policy, const FitOptions& fit_options = {});

}  // namespace polsfp
