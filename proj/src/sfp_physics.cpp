// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/sfp_physics.hpp"

#include <cmath>
#include <limits>

#include "polsfp/error.hpp"

namespace polsfp {

namespace {

double snap(double angle) { return std::round(angle / kAngleQuantum) * kAngleQuantum; }

std::size_t argmax_dot(const PixelCandidates& c, const Vec3& ref, std::size_t begin, std::size_t end) {
    std::size_t best = begin;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i < end; ++i) {
        const double d = dot(c.normals[i].to_vector(), ref);
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

std::size_t select_candidate(const PixelCandidates& c, int y, int x, const DisambiguationPolicy& policy) {
    const std::size_t n = c.normals.size();
    if (n <= 1) return 0;
    if (const auto* oracle = std::get_if<OraclePolicy>(&policy))
        return argmax_dot(c, oracle->reference.at(y, x), 0, n);
    if (const auto* fixed = std::get_if<FixedBranchPolicy>(&policy)) return fixed->index % n;

    const auto& convex = std::get<ConvexityPolicy>(policy);
    // Candidates come grouped by zenith (ascending), each group holding the
    // azimuth pair. Restrict to the preferred zenith group first.
    double target_zenith = convex.sub_brewster ? c.normals.front().zenith : c.normals.back().zenith;
    std::size_t begin = n, end = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (c.normals[i].zenith == target_zenith) {
            if (begin == n) begin = i;
            end = i + 1;
        }
    }
    const Vec3 outward{x - convex.cx, y - convex.cy, 0.0};
    return argmax_dot(c, outward, begin, end);
}

ReconstructionReport reconstruct_physics(const PolarizedStack& stack, const Mask& mask, const Material& material,
                                         const DisambiguationPolicy& policy, const FitOptions& fit_options) {
    if (mask.height != stack.height || mask.width != stack.width)
        throw Error(ErrorCode::DimensionMismatch, "mask and stack sizes disagree");
    if (const auto* oracle = std::get_if<OraclePolicy>(&policy))
        if (oracle->reference.height != stack.height || oracle->reference.width != stack.width)
            throw Error(ErrorCode::DimensionMismatch, "oracle reference size differs from the stack");
    const std::size_t fg = mask.count();
    if (fg == 0) throw Error(ErrorCode::EmptyMask, "reconstruction mask has no foreground pixels");
    material.validate();

    const PolarizationMap pmap = fit_stack(stack, mask, fit_options);
    const CandidateField field = normals_from_polarization(pmap, material);

    ReconstructionReport report;
    report.normal_map = NormalMap(stack.height, stack.width);
    report.normal_map.mask = mask;
    report.candidate_counts.assign(field.pixels.size(), 0);
    report.invalid.assign(field.pixels.size(), 0);
    std::size_t clamped = 0, invalid = 0;

    for (int y = 0; y < stack.height; ++y) {
        for (int x = 0; x < stack.width; ++x) {
            if (!mask.at(y, x)) continue;
            const std::size_t i = pmap.index(y, x);
            const PixelCandidates& c = field.pixels[i];
            report.candidate_counts[i] = static_cast<std::uint8_t>(c.normals.size());
            const bool bad = !pmap.valid[i] || !pmap.phase_valid[i] || c.normals.empty() || c.not_finite;
            if (bad) {
                report.invalid[i] = 1;
                ++invalid;
            }
            if (c.clamped) ++clamped;
            if (!pmap.valid[i] || c.normals.empty() || c.not_finite) {
                report.normal_map.at(y, x) = {0.0, 0.0, 1.0};
                continue;
            }
            const SphericalNormal chosen = c.normals[select_candidate(c, y, x, policy)];
            report.normal_map.at(y, x) = SphericalNormal{snap(chosen.azimuth), snap(chosen.zenith)}.to_vector();
        }
    }
    report.clamped_fraction = static_cast<double>(clamped) / static_cast<double>(fg);
    report.invalid_fraction = static_cast<double>(invalid) / static_cast<double>(fg);
    return report;
}

}  // namespace polsfp
