// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "polsfp/error.hpp"

namespace fs = std::filesystem;

namespace polsfp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::string geometry_name(const Geometry& g) {
    return std::visit(overloaded{[](const Sphere&) { return std::string("sphere"); },
                                 [](const HeightField&) { return std::string("heightfield"); },
                                 [](const Plane&) { return std::string("plane"); }},
                      g);
}

RenderConfig with_condition(RenderConfig base, LightingCondition condition) {
    switch (condition) {
    case LightingCondition::Indoor:
        base.light_scale *= 0.6;
        break;
    case LightingCondition::Sunny:
        base.noise_sigma *= 0.5;
        break;
    case LightingCondition::Cloudy:
        base.light_scale *= 0.35;
        base.noise_sigma *= 1.5;
        break;
    }
    return base;
}

HeightField make_height_field(int height, int width, int bumps, std::uint64_t seed) {
    HeightField hf;
    hf.height = height;
    hf.width = width;
    hf.heights.assign(static_cast<std::size_t>(height) * width, 0.0);
    std::mt19937_64 rng(seed);
    const double side = std::min(height, width);
    double peak = 0.0;
    for (int b = 0; b < bumps; ++b) {
        const double cx = uniform(rng, 0.3, 0.7) * (width - 1);
        const double cy = uniform(rng, 0.3, 0.7) * (height - 1);
        const double sigma = uniform(rng, 0.06, 0.14) * side;
        const double amp = sigma * uniform(rng, 0.8, 2.5);
        peak = std::max(peak, amp);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                hf.heights[static_cast<std::size_t>(y) * width + x] += amp * std::exp(-d2 / (2.0 * sigma * sigma));
            }
        }
    }
    hf.support = 0.15 * peak;
    return hf;
}

void validate_scene(const Scene& scene, const RenderConfig& config) {
    if (config.height <= 0 || config.width <= 0) throw Error(ErrorCode::DomainError, "render size must be positive");
    if (!(config.noise_sigma >= 0.0)) throw Error(ErrorCode::DomainError, "noise_sigma must be >= 0");
    if (!(scene.albedo > 0.0 && scene.albedo <= 1.0)) throw Error(ErrorCode::DomainError, "albedo must lie in (0, 1]");
    scene.material.validate();
    std::visit(overloaded{[&](const Sphere& s) {
                              if (!(s.radius > 0.0) || s.cx - s.radius < 0.0 || s.cy - s.radius < 0.0 ||
                                  s.cx + s.radius > config.width - 1 || s.cy + s.radius > config.height - 1)
                                  throw Error(ErrorCode::DomainError, "sphere does not fit inside the image");
                          },
                          [&](const HeightField& hf) {
                              if (hf.height != config.height || hf.width != config.width ||
                                  hf.heights.size() != static_cast<std::size_t>(hf.height) * hf.width)
                                  throw Error(ErrorCode::DimensionMismatch, "height field does not match image size");
                          },
                          [&](const Plane& p) {
                              if (!(p.tilt >= 0.0 && p.tilt < kPi / 2.0))
                                  throw Error(ErrorCode::DomainError, "plane tilt must lie in [0, pi/2)");
                          }},
               scene.geometry);
}

NormalMap ground_truth(const Scene& scene, const RenderConfig& config) {
    validate_scene(scene, config);
    const int h = config.height, w = config.width;
    NormalMap out(h, w);
    auto set = [&](int y, int x, const Vec3& n) {
        out.at(y, x) = n;
        out.mask.set(y, x, true);
    };

    std::visit(overloaded{[&](const Sphere& s) {
                              for (int y = 0; y < h; ++y) {
                                  for (int x = 0; x < w; ++x) {
                                      const double dx = (x - s.cx) / s.radius;
                                      const double dy = (y - s.cy) / s.radius;
                                      const double r2 = dx * dx + dy * dy;
                                      if (r2 >= 1.0) continue;
                                      set(y, x, normalized({dx, dy, std::sqrt(1.0 - r2)}));
                                  }
                              }
                          },
                          [&](const HeightField& hf) {
                              for (int y = 0; y < h; ++y) {
                                  for (int x = 0; x < w; ++x) {
                                      if (!(hf.at(y, x) > hf.support)) continue;
                                      const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
                                      const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
                                      const double gx = (hf.at(y, xr) - hf.at(y, xl)) / (xr - xl);
                                      const double gy = (hf.at(yd, x) - hf.at(yu, x)) / (yd - yu);
                                      set(y, x, normalized({-gx, -gy, 1.0}));
                                  }
                              }
                          },
                          [&](const Plane& p) {
                              const Vec3 n = SphericalNormal{p.tilt_azimuth, p.tilt}.to_vector();
                              for (int y = 0; y < h; ++y)
                                  for (int x = 0; x < w; ++x) set(y, x, n);
                          }},
               scene.geometry);
    return out;
}

PolarizedStack render(const Scene& scene, const RenderConfig& config) {
    const NormalMap gt = ground_truth(scene, config);
    if (config.angles.size() < 3) throw Error(ErrorCode::DomainError, "rendering needs at least 3 polarizer angles");
    PolarizedStack stack(config.height, config.width, config.angles);
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto& mat = scene.material;
    const std::size_t k_count = config.angles.size();

    for (int y = 0; y < config.height; ++y) {
        for (int x = 0; x < config.width; ++x) {
            if (!gt.mask.at(y, x)) continue;
            const Vec3& n = gt.at(y, x);
            const SphericalNormal sn = SphericalNormal::from_vector(n);
            double rho = 0.0;
            double phase = 0.0;
            if (mat.mode == ReflectionMode::Diffuse) {
                rho = dop_diffuse(mat.eta, sn.zenith);
                phase = wrap_angle(sn.azimuth, kPi);
            } else {
                rho = dop_specular(mat.eta, sn.zenith).value;
                phase = wrap_angle(sn.azimuth - kPi / 2.0, kPi);
            }
            const double shading = scene.shading == Shading::LambertFrontal ? std::max(n.z, 0.0) : 1.0;
            const double unpolarized = config.light_scale * scene.albedo * shading;
            const SinusoidParams params{unpolarized, unpolarized * rho, phase, rho > 0.0};
            for (std::size_t k = 0; k < k_count; ++k) {
                double v = eval_sinusoid(params, config.angles[k]);
                if (config.noise_sigma > 0.0) v += config.noise_sigma * noise(rng);
                stack.at(y, x, k) = std::max(v, 0.0);
            }
        }
    }
    return stack;
}

std::string scene_object_id(std::size_t index) {
    char id[32];
    std::snprintf(id, sizeof(id), "obj%04zu", index);
    return id;
}

SceneSample random_scene(const DatasetOptions& options, std::uint64_t seed, std::size_t index) {
    auto rng = stream_for(seed, index);
    SceneSample out;
    const int h = options.height, w = options.width;
    const double side = std::min(h, w);

    if (uniform(rng, 0.0, 1.0) < 0.5) {
        Sphere s;
        s.radius = uniform(rng, 0.3, 0.45) * (side - 1);
        s.cx = uniform(rng, s.radius, (w - 1) - s.radius);
        s.cy = uniform(rng, s.radius, (h - 1) - s.radius);
        out.scene.geometry = s;
    } else {
        const int bumps = 1 + static_cast<int>(rng() % 4);
        out.scene.geometry = make_height_field(h, w, bumps, rng());
    }
    out.scene.material.eta =
        options.eta_max > options.eta_min ? uniform(rng, options.eta_min, options.eta_max) : options.eta_min;
    out.scene.material.mode = options.mode;
    out.scene.albedo = uniform(rng, 0.4, 1.0);
    out.scene.shading = uniform(rng, 0.0, 1.0) < 0.5 ? Shading::Constant : Shading::LambertFrontal;

    const auto condition = static_cast<LightingCondition>(index % 3);
    RenderConfig cfg;
    cfg.height = h;
    cfg.width = w;
    cfg.noise_sigma = options.noise_sigma;
    cfg.seed = rng();
    out.config = with_condition(cfg, condition);

    out.entry.scene_index = index;
    out.entry.object_id = scene_object_id(index);
    out.entry.condition = condition;
    out.entry.geometry = geometry_name(out.scene.geometry);
    out.entry.eta = out.scene.material.eta;
    out.entry.mode = options.mode;
    out.entry.noise_sigma = out.config.noise_sigma;
    return out;
}

std::vector<ManifestEntry> make_dataset(std::size_t n_scenes, const DatasetOptions& options, const fs::path& out_dir,
                                        std::uint64_t seed) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw Error(ErrorCode::IoError, "cannot create dataset directory " + out_dir.string());
    if (!(options.test_fraction >= 0.0 && options.test_fraction <= 1.0))
        throw Error(ErrorCode::DomainError, "test_fraction must lie in [0, 1]");

    const auto n_test = static_cast<std::size_t>(std::llround(options.test_fraction * static_cast<double>(n_scenes)));
    std::vector<ManifestEntry> manifest;
    SplitSpec split;
    for (std::size_t i = 0; i < n_scenes; ++i) {
        SceneSample s = random_scene(options, seed, i);
        s.entry.test = i >= n_scenes - n_test;
        SampleRecord rec;
        rec.object_id = s.entry.object_id;
        rec.condition = s.entry.condition;
        rec.view = View::Front;
        rec.normals = ground_truth(s.scene, s.config);
        rec.stack = render(s.scene, s.config);
        write_sample(rec, sample_dir(out_dir, rec.object_id, rec.condition, rec.view));
        (s.entry.test ? split.test_objects : split.train_objects).insert(rec.object_id);
        manifest.push_back(s.entry);
    }

    std::ofstream out(out_dir / "manifest.txt", std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write manifest in " + out_dir.string());
    out.precision(17);
    for (const auto& e : manifest)
        out << e.scene_index << '\t' << e.geometry << '\t' << e.eta << '\t'
            << (e.mode == ReflectionMode::Diffuse ? "diffuse" : "specular") << '\t' << e.noise_sigma << '\n';
    if (!out) throw Error(ErrorCode::IoError, "manifest write failed");
    write_split_file(split, out_dir / "split.txt");
    return manifest;
}

}  // namespace polsfp
