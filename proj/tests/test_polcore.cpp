// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "polsfp/error.hpp"
#include "polsfp/polcore.hpp"

namespace polsfp {
namespace {

// Phase difference modulo pi, in [0, pi/2].
double phase_gap(double a, double b) {
    const double d = wrap_angle(a - b, kPi);
    return std::min(d, kPi - d);
}

std::vector<PolarizationSample> sample(const SinusoidParams& p, const std::vector<PolarizerAngle>& angles) {
    std::vector<PolarizationSample> out;
    for (const auto& a : angles) out.push_back({a, eval_sinusoid(p, a)});
    return out;
}

TEST(PolarizerAngle, NormalizesIntoHalfTurn) {
    EXPECT_DOUBLE_EQ(PolarizerAngle::from_degrees(180.0).radians(), 0.0);
    EXPECT_NEAR(PolarizerAngle::from_degrees(-45.0).degrees(), 135.0, 1e-12);
    EXPECT_NEAR(PolarizerAngle::from_degrees(225.0).degrees(), 45.0, 1e-12);
    const double r = PolarizerAngle::from_radians(std::nextafter(kPi, 0.0)).radians();
    EXPECT_GE(r, 0.0);
    EXPECT_LT(r, kPi);
}

TEST(EvalSinusoid, ScalarOracle) {
    // 1 + 0.4 cos(2 (0 - 30 deg)), evaluated independently
    const SinusoidParams p{1.0, 0.4, deg_to_rad(30.0)};
    EXPECT_NEAR(eval_sinusoid(p, PolarizerAngle::from_degrees(0.0)), 1.2, 1e-15);
}

TEST(EvalSinusoid, ConstantAndPeak) {
    EXPECT_DOUBLE_EQ(eval_sinusoid({0.7, 0.0, 1.0}, PolarizerAngle::from_degrees(33.0)), 0.7);
    const double phi = deg_to_rad(70.0);
    EXPECT_DOUBLE_EQ(eval_sinusoid({1.0, 0.5, phi}, PolarizerAngle::from_radians(phi)), 1.5);
}

TEST(EvalSinusoid, PeriodPiAndBounds) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double mean = u(rng) * 2.0;
        const SinusoidParams p{mean, mean * u(rng), u(rng) * kPi};
        const double a = u(rng) * 4.0 * kPi;
        const double v1 = p.i_mean + p.amplitude * std::cos(2.0 * (a - p.phase));
        const double v2 = p.i_mean + p.amplitude * std::cos(2.0 * (a + kPi - p.phase));
        EXPECT_NEAR(v1, v2, 1e-12);
        const double v = eval_sinusoid(p, PolarizerAngle::from_radians(a));
        EXPECT_NEAR(v, v1, 1e-12);
        EXPECT_GE(v, p.i_min() - 1e-12);
        EXPECT_LE(v, p.i_max() + 1e-12);
    }
}

TEST(FitSinusoid, CanonicalRoundTrip) {
    const SinusoidParams p{1.0, 0.4, deg_to_rad(30.0)};
    for (auto method : {FitMethod::ClosedFormQuad, FitMethod::LeastSquares}) {
        const auto fit = fit_sinusoid(sample(p, canonical_angles()), method);
        EXPECT_NEAR(fit.i_mean, 1.0, 1e-12);
        EXPECT_NEAR(fit.amplitude, 0.4, 1e-12);
        EXPECT_NEAR(phase_gap(fit.phase, p.phase), 0.0, 1e-12);
        EXPECT_TRUE(fit.phase_defined);
    }
}

TEST(FitSinusoid, SevenArbitraryAngles) {
    const SinusoidParams p{2.0, 0.3, deg_to_rad(100.0)};
    std::vector<PolarizerAngle> angles;
    for (double d : {3.0, 21.0, 50.0, 77.0, 101.0, 140.0, 171.0}) angles.push_back(PolarizerAngle::from_degrees(d));
    const auto fit = fit_sinusoid(sample(p, angles), FitMethod::LeastSquares);
    EXPECT_NEAR(fit.i_mean, 2.0, 1e-10);
    EXPECT_NEAR(fit.amplitude, 0.3, 1e-10);
    EXPECT_NEAR(phase_gap(fit.phase, p.phase), 0.0, 1e-10);
}

TEST(FitSinusoid, ConstantSamplesLeavePhaseUndefined) {
    for (auto method : {FitMethod::ClosedFormQuad, FitMethod::LeastSquares}) {
        const auto fit = fit_sinusoid(sample({0.8, 0.0, 0.0}, canonical_angles()), method);
        EXPECT_NEAR(fit.i_mean, 0.8, 1e-15);
        EXPECT_NEAR(fit.amplitude, 0.0, 1e-15);
        EXPECT_FALSE(fit.phase_defined);
    }
}

TEST(FitSinusoid, DegenerateAngles) {
    const std::vector<PolarizationSample> s = {{PolarizerAngle::from_degrees(0), 1.0},
                                               {PolarizerAngle::from_degrees(90), 0.5},
                                               {PolarizerAngle::from_degrees(180), 1.0}};
    try {
        fit_sinusoid(s, FitMethod::LeastSquares);
        FAIL() << "expected DegenerateFit";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateFit);
    }
    const std::vector<PolarizationSample> two = {{PolarizerAngle::from_degrees(0), 1.0},
                                                 {PolarizerAngle::from_degrees(45), 1.0}};
    EXPECT_THROW(fit_sinusoid(two, FitMethod::LeastSquares), Error);
}

TEST(FitSinusoid, ClosedFormNeedsCanonicalSet) {
    std::vector<PolarizerAngle> angles;
    for (double d : {0.0, 30.0, 90.0, 135.0}) angles.push_back(PolarizerAngle::from_degrees(d));
    EXPECT_THROW(fit_sinusoid(sample({1.0, 0.2, 0.3}, angles), FitMethod::ClosedFormQuad), Error);
    // any order of the canonical set is accepted
    auto c = canonical_angles();
    std::reverse(c.begin(), c.end());
    const auto fit = fit_sinusoid(sample({1.0, 0.2, 0.3}, c), FitMethod::ClosedFormQuad);
    EXPECT_NEAR(fit.phase, 0.3, 1e-12);
}

TEST(FitSinusoid, IdempotenceAndMethodAgreement) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double mean = 0.01 + u(rng);
        const SinusoidParams p{mean, mean * (0.01 + 0.99 * u(rng)), u(rng) * kPi};
        const auto s = sample(p, canonical_angles());
        const auto a = fit_sinusoid(s, FitMethod::ClosedFormQuad);
        const auto b = fit_sinusoid(s, FitMethod::LeastSquares);
        EXPECT_NEAR(a.i_mean, p.i_mean, 1e-10);
        EXPECT_NEAR(a.amplitude, p.amplitude, 1e-10);
        EXPECT_LT(phase_gap(a.phase, p.phase), 1e-10);
        EXPECT_NEAR(a.i_mean, b.i_mean, 1e-10);
        EXPECT_NEAR(a.amplitude, b.amplitude, 1e-10);
        EXPECT_LT(phase_gap(a.phase, b.phase), 1e-10);
        EXPECT_GE(a.phase, 0.0);
        EXPECT_LT(a.phase, kPi);
    }
}

TEST(FitSinusoid, NoiseRobustness) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> errors;
    while (errors.size() < 1000) {
        const double mean = 0.25 + 0.25 * u(rng);
        const double rho = 0.2 + 0.8 * u(rng);
        const SinusoidParams p{mean, rho * mean, u(rng) * kPi};
        auto s = sample(p, canonical_angles());
        for (auto& x : s) x.intensity = std::clamp(x.intensity + noise(rng), 0.0, 1.0);
        errors.push_back(rad_to_deg(phase_gap(fit_sinusoid(s, FitMethod::LeastSquares).phase, p.phase)));
    }
    std::nth_element(errors.begin(), errors.begin() + 500, errors.end());
    EXPECT_LT(errors[500], 2.0);
}

TEST(FitStack, PerPixelRules) {
    PolarizedStack stack(1, 5, canonical_angles());
    auto put = [&](int x, std::array<double, 4> v) {
        for (int k = 0; k < 4; ++k) stack.at(0, x, k) = v[k];
    };
    put(0, {1.0, 0.5, 0.0, 0.5});  // I_max = 1, I_min = 0
    put(1, {0.3, 0.3, 0.3, 0.3});  // unpolarized
    put(2, {0.0, 0.0, 0.0, 0.0});  // dark
    put(3, {3.0, 1.0, 0.0, 1.0});  // amplitude above mean
    put(4, {1.0, 0.5, 0.0, 0.5});  // background
    Mask mask = Mask::full(1, 5);
    mask.set(0, 4, false);
    const auto pm = fit_stack(stack, mask);
    EXPECT_TRUE(pm.valid[0]);
    EXPECT_NEAR(pm.rho[0], 1.0, 1e-15);
    EXPECT_NEAR(pm.intensity[0], 1.0, 1e-15);
    EXPECT_TRUE(pm.valid[1]);
    EXPECT_NEAR(pm.rho[1], 0.0, 1e-15);
    EXPECT_FALSE(pm.phase_valid[1]);
    EXPECT_FALSE(pm.valid[2]);
    EXPECT_FALSE(pm.valid[3]);
    EXPECT_FALSE(pm.valid[4]);
}

TEST(FitStack, DimensionMismatch) {
    PolarizedStack stack(2, 2, canonical_angles());
    try {
        fit_stack(stack, Mask::full(2, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(PolarizedStack, Validation) {
    PolarizedStack ok(1, 1, canonical_angles());
    EXPECT_NO_THROW(ok.validate());
    PolarizedStack neg = ok;
    neg.intensities[0] = -1.0;
    EXPECT_THROW(neg.validate(), Error);
    PolarizedStack nan = ok;
    nan.intensities[2] = std::nan("");
    EXPECT_THROW(nan.validate(), Error);
    PolarizedStack few(1, 1, {PolarizerAngle::from_degrees(0), PolarizerAngle::from_degrees(60)});
    EXPECT_THROW(few.validate(), Error);
    PolarizedStack dup(1, 1,
                       {PolarizerAngle::from_degrees(0), PolarizerAngle::from_degrees(60), PolarizerAngle::from_degrees(180)});
    EXPECT_THROW(dup.validate(), Error);
}

}  // namespace
}  // namespace polsfp
