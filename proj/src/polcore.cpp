// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/polcore.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "polsfp/error.hpp"

namespace polsfp {

double wrap_angle(double radians, double period) {
    double r = std::fmod(radians, period);
    if (r < 0.0) r += period;
    // fmod of a tiny negative value can round up to exactly `period`.
    if (r >= period) r = 0.0;
    return r;
}

PolarizerAngle PolarizerAngle::from_radians(double radians) {
    if (!std::isfinite(radians)) throw Error(ErrorCode::DomainError, "polarizer angle is not finite");
    return PolarizerAngle(wrap_angle(radians, kPi));
}

std::vector<PolarizerAngle> canonical_angles() {
    return {PolarizerAngle::from_degrees(0), PolarizerAngle::from_degrees(45), PolarizerAngle::from_degrees(90),
            PolarizerAngle::from_degrees(135)};
}

Mask::Mask(int h, int w, bool value)
    : height(h), width(w), bits(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), value ? 1 : 0) {}

std::size_t Mask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0;
    return n;
}

PolarizedStack::PolarizedStack(int h, int w, std::vector<PolarizerAngle> angle_list)
    : height(h), width(w), angles(std::move(angle_list)),
      intensities(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * angles.size(), 0.0) {}

namespace {

constexpr double kAngleTol = 1e-9;

bool same_angle_mod_pi(double a, double b) {
    double d = std::fabs(a - b);
    return d < kAngleTol || std::fabs(d - kPi) < kAngleTol;
}

std::size_t distinct_angle_count(std::span<const double> angles) {
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        bool seen = false;
        for (std::size_t j = 0; j < i && !seen; ++j) seen = same_angle_mod_pi(angles[i], angles[j]);
        distinct += !seen;
    }
    return distinct;
}

// Position of each canonical angle (0, 45, 90, 135 deg) in `angles`, if the
// set matches exactly.
std::optional<std::array<std::size_t, 4>> canonical_order(std::span<const double> angles) {
    if (angles.size() != 4) return std::nullopt;
    std::array<std::size_t, 4> order{};
    for (std::size_t c = 0; c < 4; ++c) {
        const double target = static_cast<double>(c) * kPi / 4.0;
        bool found = false;
        for (std::size_t k = 0; k < 4 && !found; ++k) {
            if (same_angle_mod_pi(angles[k], target)) {
                order[c] = k;
                found = true;
            }
        }
        if (!found) return std::nullopt;
    }
    return order;
}

SinusoidParams params_from_components(double offset, double c, double s, double phase_epsilon) {
    SinusoidParams p;
    p.i_mean = offset;
    p.amplitude = std::hypot(c, s);
    p.phase_defined = p.amplitude > phase_epsilon * std::fabs(offset) && p.amplitude > 0.0;
    p.phase = p.phase_defined ? wrap_angle(0.5 * std::atan2(s, c), kPi) : 0.0;
    return p;
}

// Linear least squares on I = offset + c cos 2a + s sin 2a. The normal matrix
// depends only on the angles, so it is inverted once and reused per pixel.
class SinusoidSolver {
public:
    explicit SinusoidSolver(std::span<const double> angles) {
        if (distinct_angle_count(angles) < 3)
            throw Error(ErrorCode::DegenerateFit, "need at least three distinct polarizer angles mod pi");
        cos2_.reserve(angles.size());
        sin2_.reserve(angles.size());
        std::array<std::array<double, 3>, 3> m{};
        for (double a : angles) {
            const double row[3] = {1.0, std::cos(2.0 * a), std::sin(2.0 * a)};
            cos2_.push_back(row[1]);
            sin2_.push_back(row[2]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
        }
        invert(m);
    }

    std::array<double, 3> solve(std::span<const double> intensities) const {
        double b0 = 0.0, b1 = 0.0, b2 = 0.0;
        for (std::size_t k = 0; k < intensities.size(); ++k) {
            b0 += intensities[k];
            b1 += intensities[k] * cos2_[k];
            b2 += intensities[k] * sin2_[k];
        }
        std::array<double, 3> x{};
        for (int i = 0; i < 3; ++i) x[i] = inv_[i][0] * b0 + inv_[i][1] * b1 + inv_[i][2] * b2;
        return x;
    }

private:
    void invert(const std::array<std::array<double, 3>, 3>& m) {
        const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
        const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
        const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
        const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
        const double n = static_cast<double>(cos2_.size());
        if (!(std::fabs(det) > 1e-12 * n * n * n))
            throw Error(ErrorCode::DegenerateFit, "rank-deficient sinusoid design matrix");
        const double inv_det = 1.0 / det;
        inv_[0] = {c00 * inv_det, (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det,
                   (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det};
        inv_[1] = {c01 * inv_det, (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det,
                   (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det};
        inv_[2] = {c02 * inv_det, (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det,
                   (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det};
    }

    std::vector<double> cos2_;
    std::vector<double> sin2_;
    std::array<std::array<double, 3>, 3> inv_{};
};

SinusoidParams closed_form_quad(double i0, double i45, double i90, double i135, double phase_epsilon) {
    const double s0 = (i0 + i45 + i90 + i135) / 2.0;
    const double s1 = i0 - i90;
    const double s2 = i45 - i135;
    return params_from_components(s0 / 2.0, s1 / 2.0, s2 / 2.0, phase_epsilon);
}

constexpr double kDefaultPhaseEpsilon = 1e-12;

}  // namespace

void PolarizedStack::validate() const {
    if (angles.size() < 3) throw Error(ErrorCode::DomainError, "a polarized stack needs at least 3 angles");
    std::vector<double> a;
    for (auto angle : angles) a.push_back(angle.radians());
    if (distinct_angle_count(a) != a.size())
        throw Error(ErrorCode::DomainError, "polarizer angles must be pairwise distinct mod pi");
    if (height <= 0 || width <= 0) throw Error(ErrorCode::DomainError, "stack dimensions must be positive");
    if (intensities.size() != static_cast<std::size_t>(height) * width * angles.size())
        throw Error(ErrorCode::DimensionMismatch, "intensity buffer does not match H x W x K");
    for (double v : intensities)
        if (!std::isfinite(v) || v < 0.0)
            throw Error(ErrorCode::DomainError, "intensities must be finite and nonnegative");
}

double eval_sinusoid(const SinusoidParams& params, PolarizerAngle angle) {
    return params.i_mean + params.amplitude * std::cos(2.0 * (angle.radians() - params.phase));
}

SinusoidParams fit_sinusoid(std::span<const PolarizationSample> samples, FitMethod method) {
    std::vector<double> angles, values;
    angles.reserve(samples.size());
    values.reserve(samples.size());
    for (const auto& s : samples) {
        angles.push_back(s.angle.radians());
        values.push_back(s.intensity);
    }
    if (method == FitMethod::ClosedFormQuad) {
        auto order = canonical_order(angles);
        if (!order)
            throw Error(ErrorCode::DegenerateFit, "closed-form fit requires the angle set {0, 45, 90, 135} degrees");
        const auto& o = *order;
        return closed_form_quad(values[o[0]], values[o[1]], values[o[2]], values[o[3]], kDefaultPhaseEpsilon);
    }
    if (samples.size() < 3) throw Error(ErrorCode::DegenerateFit, "need at least three samples");
    const SinusoidSolver solver(angles);
    const auto x = solver.solve(values);
    return params_from_components(x[0], x[1], x[2], kDefaultPhaseEpsilon);
}

PolarizationMap::PolarizationMap(int h, int w)
    : height(h), width(w), phi(static_cast<std::size_t>(h) * w, 0.0), rho(phi.size(), 0.0),
      intensity(phi.size(), 0.0), valid(phi.size(), 0), phase_valid(phi.size(), 0) {}

PolarizationMap fit_stack(const PolarizedStack& stack, const Mask& mask, const FitOptions& options) {
    if (mask.height != stack.height || mask.width != stack.width)
        throw Error(ErrorCode::DimensionMismatch, "mask " + std::to_string(mask.height) + "x" +
                                                      std::to_string(mask.width) + " vs stack " +
                                                      std::to_string(stack.height) + "x" + std::to_string(stack.width));
    stack.validate();

    std::vector<double> angles;
    for (auto a : stack.angles) angles.push_back(a.radians());

    std::optional<std::array<std::size_t, 4>> order;
    std::optional<SinusoidSolver> solver;
    if (options.method == FitMethod::ClosedFormQuad) {
        order = canonical_order(angles);
        if (!order)
            throw Error(ErrorCode::DegenerateFit, "closed-form fit requires the angle set {0, 45, 90, 135} degrees");
    } else {
        solver.emplace(angles);
    }

    PolarizationMap map(stack.height, stack.width);
    for (int y = 0; y < stack.height; ++y) {
        for (int x = 0; x < stack.width; ++x) {
            if (!mask.at(y, x)) continue;
            const auto px = stack.pixel(y, x);
            SinusoidParams p;
            if (order) {
                const auto& o = *order;
                p = closed_form_quad(px[o[0]], px[o[1]], px[o[2]], px[o[3]], options.phase_epsilon);
            } else {
                const auto c = solver->solve(px);
                p = params_from_components(c[0], c[1], c[2], options.phase_epsilon);
            }
            const std::size_t i = map.index(y, x);
            map.intensity[i] = 2.0 * p.i_mean;
            if (!(p.i_mean >= options.min_intensity)) continue;
            const double rho = p.amplitude / p.i_mean;
            if (!(rho <= 1.0)) continue;
            map.rho[i] = rho;
            map.phi[i] = p.phase;
            map.valid[i] = 1;
            map.phase_valid[i] = p.phase_defined ? 1 : 0;
        }
    }
    return map;
}

}  // namespace polsfp
