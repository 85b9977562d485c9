// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Polarized image stacks and the per-pixel sinusoid fit
//
//   I(a) = i_mean + amplitude * cos(2 (a - phase))
//
// that turns K >= 3 intensity samples behind a rotating linear polarizer into
// angle of polarization, degree of polarization and total intensity.

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace polsfp {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Reduces an angle into [0, period).
double wrap_angle(double radians, double period);

/// Transmission-axis angle of the polarizer, kept in [0, pi).
class PolarizerAngle {
public:
    PolarizerAngle() = default;

    static PolarizerAngle from_radians(double radians);
    static PolarizerAngle from_degrees(double degrees) { return from_radians(deg_to_rad(degrees)); }

    double radians() const { return radians_; }
    double degrees() const { return rad_to_deg(radians_); }

    friend bool operator==(PolarizerAngle, PolarizerAngle) = default;

private:
    explicit PolarizerAngle(double radians) : radians_(radians) {}
    double radians_ = 0.0;
};

/// The 0/45/90/135 degree set used by four-channel polarization cameras.
std::vector<PolarizerAngle> canonical_angles();

struct Mask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits;  // row-major, 1 = foreground

    Mask() = default;
    Mask(int h, int w, bool value = false);

    static Mask full(int h, int w) { return Mask(h, w, true); }

    bool at(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int y, int x, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;
    std::size_t size() const { return bits.size(); }

    friend bool operator==(const Mask&, const Mask&) = default;
};

/// H x W x K intensities, channel-last, one channel per polarizer angle.
struct PolarizedStack {
    int height = 0;
    int width = 0;
    std::vector<PolarizerAngle> angles;
    std::vector<double> intensities;

    PolarizedStack() = default;
    PolarizedStack(int h, int w, std::vector<PolarizerAngle> angle_list);

    std::size_t channels() const { return angles.size(); }
    double& at(int y, int x, std::size_t k) {
        return intensities[(static_cast<std::size_t>(y) * width + x) * channels() + k];
    }
    double at(int y, int x, std::size_t k) const {
        return intensities[(static_cast<std::size_t>(y) * width + x) * channels() + k];
    }
    std::span<const double> pixel(int y, int x) const {
        return {intensities.data() + (static_cast<std::size_t>(y) * width + x) * channels(), channels()};
    }

    /// Throws DomainError unless K >= 3, angles are distinct mod pi and every
    /// intensity is finite and nonnegative.
    void validate() const;

    friend bool operator==(const PolarizedStack&, const PolarizedStack&) = default;
};

struct SinusoidParams {
    double i_mean = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;  // [0, pi)
    bool phase_defined = true;  // false when amplitude vanishes

    double i_max() const { return i_mean + amplitude; }
    double i_min() const { return i_mean - amplitude; }
};

struct PolarizationSample {
    PolarizerAngle angle;
    double intensity = 0.0;
};

enum class FitMethod { ClosedFormQuad, LeastSquares };

double eval_sinusoid(const SinusoidParams& params, PolarizerAngle angle);

/// ClosedFormQuad needs exactly the canonical four angles (any order).
/// Throws DegenerateFit when fewer than three distinct angles mod pi exist.
SinusoidParams fit_sinusoid(std::span<const PolarizationSample> samples, FitMethod method);

struct FitOptions {
    FitMethod method = FitMethod::LeastSquares;
    double min_intensity = 1e-6;
    // Amplitudes at or below phase_epsilon * i_mean leave the phase undefined.
    double phase_epsilon = 1e-12;
};

struct PolarizationMap {
    int height = 0;
    int width = 0;
    std::vector<double> phi;
    std::vector<double> rho;
    std::vector<double> intensity;
    std::vector<std::uint8_t> valid;
    std::vector<std::uint8_t> phase_valid;

    PolarizationMap() = default;
    PolarizationMap(int h, int w);

    std::size_t index(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
};

PolarizationMap fit_stack(const PolarizedStack& stack, const Mask& mask, const FitOptions& options = {});

}  // namespace polsfp
