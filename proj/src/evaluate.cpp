// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/evaluate.hpp"

#include <fstream>
#include <sstream>

#include "polsfp/error.hpp"
#include "polsfp/run_config.hpp"
#include "polsfp/sfp_physics.hpp"
#include "polsfp/synth.hpp"
#include "polsfp/tinynet/train.hpp"

namespace polsfp {

namespace fs = std::filesystem;

std::map<std::string, Material> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open manifest " + path.string());
    std::map<std::string, Material> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::size_t index = 0;
        std::string geometry, mode;
        double eta = 0.0, noise = 0.0;
        if (!(row >> index >> geometry >> eta >> mode >> noise))
            throw Error(ErrorCode::DataError, path.string() + ":" + std::to_string(lineno) + ": malformed manifest row");
        Material m{eta, mode == "specular" ? ReflectionMode::Specular : ReflectionMode::Diffuse};
        out[scene_object_id(index)] = m;
    }
    return out;
}

std::vector<SampleRef> select_samples(const fs::path& root, const std::string& split) {
    auto refs = scan_dataset(root);
    if (split == "all") return refs;
    if (split != "test" && split != "train") throw Error(ErrorCode::ConfigError, "split must be test, train or all");
    const SplitSpec spec = read_split_file(root / "split.txt");
    const auto& keep = split == "test" ? spec.test_objects : spec.train_objects;
    std::vector<SampleRef> out;
    for (auto& r : refs)
        if (keep.count(r.object_id)) out.push_back(std::move(r));
    return out;
}

fs::path prediction_path(const fs::path& out, const SampleRef& ref) {
    return sample_dir(out, ref.object_id, ref.condition, ref.view) / "normals.psfp";
}

Predictor::Predictor(const EvalOptions& options) : options_(options) {
    if (options_.material_from_manifest && fs::exists(options_.dataset / "manifest.txt"))
        manifest_ = read_manifest(options_.dataset / "manifest.txt");
    if (options_.source == PredictionSource::Net)
        net_ = std::make_unique<tinynet::UNet>(tinynet::load_checkpoint(options_.checkpoint));
    if (options_.source == PredictionSource::Stored && !fs::is_directory(options_.predictions))
        throw Error(ErrorCode::MissingFile, "predictions directory not found: " + options_.predictions.string());
}

Predictor::~Predictor() = default;
Predictor::Predictor(Predictor&&) noexcept = default;

Material Predictor::material_for(const std::string& object_id) const {
    auto it = manifest_.find(object_id);
    return it == manifest_.end() ? options_.material : it->second;
}

NormalMap Predictor::predict(const SampleRecord& sample) {
    switch (options_.source) {
    case PredictionSource::Physics: {
        DisambiguationPolicy policy = parse_policy(options_.policy);
        if (auto* o = std::get_if<OraclePolicy>(&policy)) o->reference = sample.normals;
        if (auto* c = std::get_if<ConvexityPolicy>(&policy)) {
            // object centre = mask centroid
            double sx = 0.0, sy = 0.0;
            const Mask& m = sample.mask();
            for (int y = 0; y < m.height; ++y)
                for (int x = 0; x < m.width; ++x)
                    if (m.at(y, x)) {
                        sx += x;
                        sy += y;
                    }
            const double n = static_cast<double>(m.count());
            c->cx = n > 0 ? sx / n : 0.0;
            c->cy = n > 0 ? sy / n : 0.0;
        }
        return reconstruct_physics(sample.stack, sample.mask(), material_for(sample.object_id), policy, options_.fit)
            .normal_map;
    }
    case PredictionSource::Net:
        return tinynet::infer_normals(*net_, sample.stack, sample.mask());
    case PredictionSource::Stored: {
        const SampleRef ref{sample.object_id, sample.condition, sample.view, {}};
        const Raster r = read_raster(prediction_path(options_.predictions, ref));
        if (r.height != sample.stack.height || r.width != sample.stack.width || r.channels != 3)
            throw Error(ErrorCode::DimensionMismatch,
                        "prediction for " + sample.object_id + " does not match the sample dimensions");
        NormalMap out(r.height, r.width);
        out.mask = sample.mask();
        for (int y = 0; y < r.height; ++y)
            for (int x = 0; x < r.width; ++x) out.at(y, x) = {r.at(y, x, 0), r.at(y, x, 1), r.at(y, x, 2)};
        return out;
    }
    }
    throw Error(ErrorCode::ConfigError, "unknown prediction source");
}

MaeReport evaluate(const EvalOptions& options) {
    const auto refs = select_samples(options.dataset, options.split);
    if (refs.empty()) throw Error(ErrorCode::DataError, "no samples to evaluate under " + options.dataset.string());
    Predictor predictor(options);
    std::vector<SampleMae> rows;
    for (const auto& ref : refs) {
        const SampleRecord sample = load_sample(ref.dir);
        const NormalMap pred = predictor.predict(sample);
        const MaeDetail d = mae_detail(pred, sample.normals, sample.mask());
        rows.push_back({ref.object_id, ref.condition, ref.view, d.degrees, d.pixels, d.zero_length});
    }
    return MaeReport::from_samples(std::move(rows));
}

}  // namespace polsfp
