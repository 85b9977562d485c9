// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polsfp/dataio.hpp"
#include "polsfp/fresnel.hpp"
#include "polsfp/metrics.hpp"
#include "polsfp/polcore.hpp"
#include "polsfp/tinynet/unet.hpp"

namespace polsfp {

enum class PredictionSource { Physics, Net, Stored };

struct EvalOptions {
    std::filesystem::path dataset;
    PredictionSource source = PredictionSource::Physics;
    Material material;
    // Use per-object materials from <dataset>/manifest.txt when present.
    bool material_from_manifest = true;
    std::string policy = "convexity";
    FitOptions fit;
    std::filesystem::path checkpoint;   // Net
    std::filesystem::path predictions;  // Stored: <dir>/<object>/<condition>/<view>/normals.psfp
    std::string split = "test";         // test | train | all
};

/// Object id -> material from a synth manifest. Throws DataError.
std::map<std::string, Material> read_manifest(const std::filesystem::path& path);

/// Samples of `root` in the requested split, in scan order. `split` other
/// than "all" requires <root>/split.txt.
std::vector<SampleRef> select_samples(const std::filesystem::path& root, const std::string& split);

/// Produces a normal map per sample from the configured source.
class Predictor {
public:
    explicit Predictor(const EvalOptions& options);
    ~Predictor();
    Predictor(Predictor&&) noexcept;

    NormalMap predict(const SampleRecord& sample);
    Material material_for(const std::string& object_id) const;

private:
    EvalOptions options_;
    std::map<std::string, Material> manifest_;
    std::unique_ptr<tinynet::UNet> net_;
};

/// Predictions are written as <out>/<object>/<condition>/<view>/normals.psfp.
std::filesystem::path prediction_path(const std::filesystem::path& out, const SampleRef& ref);

/// Every sample is scored before the report is returned; any error aborts.
MaeReport evaluate(const EvalOptions& options);

}  // namespace polsfp
