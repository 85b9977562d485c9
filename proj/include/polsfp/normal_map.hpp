// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "polsfp/polcore.hpp"

namespace polsfp {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

/// Camera-space normals: x along image columns, y along image rows, z toward
/// the camera. Off-mask entries are zero.
struct NormalMap {
    int height = 0;
    int width = 0;
    std::vector<Vec3> normals;
    Mask mask;

    NormalMap() = default;
    NormalMap(int h, int w) : height(h), width(w), normals(static_cast<std::size_t>(h) * w), mask(h, w) {}

    Vec3& at(int y, int x) { return normals[static_cast<std::size_t>(y) * width + x]; }
    const Vec3& at(int y, int x) const { return normals[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const NormalMap&, const NormalMap&) = default;
};

}  // namespace polsfp
