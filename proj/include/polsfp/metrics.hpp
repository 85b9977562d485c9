// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polsfp/dataio.hpp"
#include "polsfp/normal_map.hpp"
#include "polsfp/polcore.hpp"

namespace polsfp {

struct MaeDetail {
    double degrees = 0.0;
    std::size_t pixels = 0;
    std::size_t zero_length = 0;  // predictions of zero length, scored as 90 degrees
};

/// Mean angle in degrees between normalized predictions and truth over the
/// mask. Throws EmptyMask or DimensionMismatch.
MaeDetail mae_detail(const NormalMap& pred, const NormalMap& truth, const Mask& mask);
double mae(const NormalMap& pred, const NormalMap& truth, const Mask& mask);

struct SampleMae {
    std::string object_id;
    LightingCondition condition = LightingCondition::Indoor;
    View view = View::Front;
    double mae_deg = 0.0;
    std::size_t pixels = 0;
    std::size_t zero_length = 0;
};

struct ObjectMae {
    std::string object_id;
    double sample_mean = 0.0;     // each sample counts once
    double pixel_weighted = 0.0;  // each foreground pixel counts once
    std::size_t pixels = 0;
    std::size_t samples = 0;
    // pixel-weighted per lighting condition, absent when not captured
    std::optional<double> by_condition[3];
};

struct MaeReport {
    std::vector<SampleMae> per_sample;
    std::vector<ObjectMae> per_object;  // sorted by object id
    std::optional<double> by_condition[3];
    double whole_set = 0.0;  // pixel-weighted over every sample
    std::size_t pixels = 0;
    std::size_t zero_length = 0;

    /// Aggregates in a fixed order so equal inputs give identical reports.
    static MaeReport from_samples(std::vector<SampleMae> samples);
};

/// Objects as rows, lighting conditions as columns, and a Whole Set row.
std::string format_table(const MaeReport& report, const std::string& title);

/// `object,condition,view,mae_deg,pixels`
std::string format_csv(const MaeReport& report);

}  // namespace polsfp
