// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic polarized scenes with analytic ground-truth normals. Orthographic
// camera looking down -z, frontal directional light, constant albedo.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "polsfp/dataio.hpp"
#include "polsfp/fresnel.hpp"
#include "polsfp/normal_map.hpp"
#include "polsfp/polcore.hpp"

namespace polsfp {

struct Sphere {
    double cx = 0.0;  // pixel coordinates (column, row)
    double cy = 0.0;
    double radius = 1.0;
};

/// Heights in pixel units on the image grid; foreground is where the height
/// exceeds `support`.
struct HeightField {
    int height = 0;
    int width = 0;
    std::vector<double> heights;
    double support = 0.0;

    double at(int y, int x) const { return heights[static_cast<std::size_t>(y) * width + x]; }
};

/// Plane covering the whole frame, tilted by `tilt` toward `tilt_azimuth`.
struct Plane {
    double tilt = 0.0;
    double tilt_azimuth = 0.0;
};

using Geometry = std::variant<Sphere, HeightField, Plane>;

std::string geometry_name(const Geometry& g);

enum class Shading { Constant, LambertFrontal };

struct Scene {
    Geometry geometry = Sphere{};
    Material material;
    double albedo = 1.0;
    Shading shading = Shading::Constant;
};

struct RenderConfig {
    int height = 64;
    int width = 64;
    std::vector<PolarizerAngle> angles = canonical_angles();
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double light_scale = 1.0;
};

/// Applies a lighting preset: scales the unpolarized intensity and the noise
/// level of `base`.
RenderConfig with_condition(RenderConfig base, LightingCondition condition);

/// Seeded sum of positive Gaussian bumps, all kept inside the frame.
HeightField make_height_field(int height, int width, int bumps, std::uint64_t seed);

/// Throws DomainError when the geometry does not fit the frame or albedo <= 0.
void validate_scene(const Scene& scene, const RenderConfig& config);

/// Unit normals on the geometry's footprint, zero elsewhere; the returned
/// map's mask is that footprint.
NormalMap ground_truth(const Scene& scene, const RenderConfig& config);

PolarizedStack render(const Scene& scene, const RenderConfig& config);

struct DatasetOptions {
    int height = 64;
    int width = 64;
    double noise_sigma = 0.0;
    double eta_min = kDefaultEta;
    double eta_max = kDefaultEta;
    ReflectionMode mode = ReflectionMode::Diffuse;
    double test_fraction = 0.0;  // trailing scenes assigned to the test split
};

struct ManifestEntry {
    std::size_t scene_index = 0;
    std::string object_id;
    LightingCondition condition = LightingCondition::Indoor;
    std::string geometry;
    double eta = kDefaultEta;
    ReflectionMode mode = ReflectionMode::Diffuse;
    double noise_sigma = 0.0;
    bool test = false;
};

struct SceneSample {
    Scene scene;
    RenderConfig config;
    ManifestEntry entry;
};

/// Scene `index` of a dataset; a pure function of (options, seed, index).
/// "obj0007" for scene 7.
std::string scene_object_id(std::size_t index);

SceneSample random_scene(const DatasetOptions& options, std::uint64_t seed, std::size_t index);

/// Writes `n_scenes` rendered samples under out_dir in the dataset layout,
/// plus `manifest.txt` and `split.txt`. Throws IoError.
std::vector<ManifestEntry> make_dataset(std::size_t n_scenes, const DatasetOptions& options,
                                        const std::filesystem::path& out_dir, std::uint64_t seed);

}  // namespace polsfp
