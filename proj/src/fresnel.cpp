// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/fresnel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polsfp/error.hpp"

namespace polsfp {

namespace {

constexpr double kHalfPi = kPi / 2.0;
constexpr double kPeakTolerance = 1e-12;

void check_zenith(double eta, double zenith) {
    if (!(eta > 1.0)) throw Error(ErrorCode::DomainError, "refractive index must exceed 1");
    if (!(zenith >= 0.0 && zenith <= kHalfPi))
        throw Error(ErrorCode::DomainError, "zenith " + std::to_string(zenith) + " outside [0, pi/2]");
}

// Root of f(t) = target on [lo, hi] where f is monotone with the given sense.
template <typename F>
double bisect(F&& f, double target, double lo, double hi, bool increasing) {
    while (hi - lo > kZenithTolerance) {
        const double mid = 0.5 * (lo + hi);
        const bool below = f(mid) < target;
        if (below == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void Material::validate(double max_eta) const {
    if (!(eta > 1.0 && eta <= max_eta))
        throw Error(ErrorCode::DomainError,
                    "refractive index " + std::to_string(eta) + " outside (1, " + std::to_string(max_eta) + "]");
}

Vec3 SphericalNormal::to_vector() const {
    const double s = std::sin(zenith);
    return {s * std::cos(azimuth), s * std::sin(azimuth), std::cos(zenith)};
}

SphericalNormal SphericalNormal::from_vector(const Vec3& n) {
    SphericalNormal s;
    s.zenith = std::atan2(std::hypot(n.x, n.y), n.z);
    s.azimuth = wrap_angle(std::atan2(n.y, n.x), 2.0 * kPi);
    return s;
}

double dop_diffuse(double eta, double zenith) {
    check_zenith(eta, zenith);
    const double s2 = std::sin(zenith) * std::sin(zenith);
    const double a = eta - 1.0 / eta;
    const double b = eta + 1.0 / eta;
    const double num = a * a * s2;
    const double den = 2.0 + 2.0 * eta * eta - b * b * s2 + 4.0 * std::cos(zenith) * std::sqrt(eta * eta - s2);
    return num / den;
}

SpecularDop dop_specular(double eta, double zenith) {
    check_zenith(eta, zenith);
    const double s2 = std::sin(zenith) * std::sin(zenith);
    const double e2 = eta * eta;
    const double num = 2.0 * s2 * std::cos(zenith) * std::sqrt(e2 - s2);
    const double den = e2 - s2 - e2 * s2 + 2.0 * s2 * s2;
    SpecularDop out;
    if (den == 0.0) {
        out.finite = false;
        return out;
    }
    out.value = num / den;
    out.finite = std::isfinite(out.value);
    return out;
}

SpecularPeak specular_peak(double eta) {
    // Golden-section search for the maximum of the unimodal specular curve.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0;
    double b = kHalfPi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = dop_specular(eta, c).value;
    double fd = dop_specular(eta, d).value;
    while (b - a > 1e-12) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = dop_specular(eta, c).value;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = dop_specular(eta, d).value;
        }
    }
    SpecularPeak peak;
    peak.zenith = 0.5 * (a + b);
    peak.value = dop_specular(eta, peak.zenith).value;
    return peak;
}

ZenithSolution invert_dop(const Material& material, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw Error(ErrorCode::DomainError, "degree of polarization " + std::to_string(rho) + " outside [0, 1]");
    const double eta = material.eta;
    ZenithSolution out;

    if (material.mode == ReflectionMode::Diffuse) {
        if (rho == 0.0) {
            out.candidates = {0.0};
            return out;
        }
        if (rho > dop_diffuse(eta, kHalfPi)) {
            out.candidates = {kHalfPi};
            out.clamped = true;
            return out;
        }
        auto f = [eta](double t) { return dop_diffuse(eta, t); };
        out.candidates = {bisect(f, rho, 0.0, kHalfPi, true)};
        return out;
    }

    const SpecularPeak peak = specular_peak(eta);
    if (std::fabs(rho - peak.value) <= kPeakTolerance) {
        out.candidates = {peak.zenith};
        return out;
    }
    if (rho > peak.value) {
        out.candidates = {peak.zenith};
        out.clamped = true;
        return out;
    }
    auto f = [eta](double t) { return dop_specular(eta, t).value; };
    const double low = rho == 0.0 ? 0.0 : bisect(f, rho, 0.0, peak.zenith, true);
    const double high = rho == 0.0 ? kHalfPi : bisect(f, rho, peak.zenith, kHalfPi, false);
    out.candidates = {low, high};
    return out;
}

std::array<double, 2> azimuth_candidates(double phase, ReflectionMode mode) {
    const double base = mode == ReflectionMode::Diffuse ? phase : phase + kHalfPi;
    return {wrap_angle(base, 2.0 * kPi), wrap_angle(base + kPi, 2.0 * kPi)};
}

PixelCandidates candidates_for_pixel(double phi, double rho, bool phase_defined, const Material& material) {
    PixelCandidates out;
    const ZenithSolution zen = invert_dop(material, rho);
    out.clamped = zen.clamped;
    const auto azimuths = azimuth_candidates(phase_defined ? phi : 0.0, material.mode);
    for (double zenith : zen.candidates) {
        if (zenith == 0.0) {
            out.normals.push_back({0.0, 0.0});
            continue;
        }
        for (double az : azimuths) out.normals.push_back({az, zenith});
    }
    for (const auto& n : out.normals)
        if (!std::isfinite(n.zenith)) out.not_finite = true;
    return out;
}

CandidateField normals_from_polarization(const PolarizationMap& pmap, const Material& material) {
    material.validate();
    CandidateField field;
    field.height = pmap.height;
    field.width = pmap.width;
    field.pixels.resize(static_cast<std::size_t>(pmap.height) * pmap.width);
    for (std::size_t i = 0; i < field.pixels.size(); ++i) {
        if (!pmap.valid[i]) continue;
        field.pixels[i] = candidates_for_pixel(pmap.phi[i], pmap.rho[i], pmap.phase_valid[i] != 0, material);
    }
    return field;
}

}  // namespace polsfp
