// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Fresnel degree-of-polarization models for diffuse and specular reflection,
// their numeric inversion to zenith angles, and the azimuth ambiguity sets.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "polsfp/normal_map.hpp"
#include "polsfp/polcore.hpp"

namespace polsfp {

enum class ReflectionMode { Diffuse, Specular };

inline constexpr double kDefaultEta = 1.5;

struct Material {
    double eta = kDefaultEta;
    ReflectionMode mode = ReflectionMode::Diffuse;

    /// Throws DomainError unless 1 < eta <= max_eta.
    void validate(double max_eta = 3.0) const;
};

/// Azimuth in [0, 2 pi) and zenith in [0, pi/2]; z points toward the camera.
struct SphericalNormal {
    double azimuth = 0.0;
    double zenith = 0.0;

    Vec3 to_vector() const;
    static SphericalNormal from_vector(const Vec3& n);
};

struct ZenithSolution {
    std::vector<double> candidates;  // ascending, each in [0, pi/2]
    bool clamped = false;
};

/// Degree of polarization of diffusely reflected light. Throws DomainError
/// for zenith outside [0, pi/2] or eta <= 1.
double dop_diffuse(double eta, double zenith);

struct SpecularDop {
    double value = 0.0;
    bool finite = true;  // false at zeros of the denominator
};

SpecularDop dop_specular(double eta, double zenith);

/// Zenith of the specular degree-of-polarization peak and its value.
struct SpecularPeak {
    double zenith = 0.0;
    double value = 0.0;
};

SpecularPeak specular_peak(double eta);

inline constexpr double kZenithTolerance = 1e-10;

ZenithSolution invert_dop(const Material& material, double rho);

/// The two azimuths consistent with a sinusoid phase in [0, pi).
std::array<double, 2> azimuth_candidates(double phase, ReflectionMode mode);

struct PixelCandidates {
    std::vector<SphericalNormal> normals;
    bool clamped = false;
    bool not_finite = false;
};

struct CandidateField {
    int height = 0;
    int width = 0;
    std::vector<PixelCandidates> pixels;

    const PixelCandidates& at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Candidate normals per pixel (up to four). Pixels flagged invalid in the map
/// yield empty lists; coincident candidates (zero zenith) are merged.
PixelCandidates candidates_for_pixel(double phi, double rho, bool phase_defined, const Material& material);
CandidateField normals_from_polarization(const PolarizationMap& pmap, const Material& material);

}  // namespace polsfp
