// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/run_config.hpp"

#include <charconv>
#include <fstream>

#include "polsfp/error.hpp"

namespace polsfp {

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"dataset", "", "dataset root"},
        {"input", "", "sample directory or raster file"},
        {"out", "out", "output directory"},
        {"checkpoint", "", "network checkpoint path"},
        {"predictions", "", "directory of predicted normal rasters"},
        {"split", "test", "samples to evaluate: test | train | all"},
        {"seed", "0", "random seed"},
        {"eta", "1.5", "refractive index"},
        {"mode", "diffuse", "diffuse | specular"},
        {"method", "physics", "physics | net"},
        {"policy", "convexity", "oracle | convexity | fixed:<i>"},
        {"fit", "lsq", "sinusoid fit: lsq | closed"},
        {"scenes", "12", "render: number of scenes"},
        {"height", "64", "render: image height"},
        {"width", "64", "render: image width"},
        {"noise_sigma", "0", "render: intensity noise"},
        {"eta_min", "1.5", "render: lowest scene eta"},
        {"eta_max", "1.5", "render: highest scene eta"},
        {"test_fraction", "0.25", "render: trailing scenes assigned to test"},
        {"depth", "3", "network encoder stages"},
        {"base_width", "8", "network stage-1 channels"},
        {"blocks_per_stage", "1", "residual blocks per stage"},
        {"l2_factor", "0.0001", "weight regularization factor"},
        {"epochs", "100", "training epochs"},
        {"batch_size", "32", "training batch size"},
        {"learning_rate", "0.0001", "Adam learning rate"},
        {"val_fraction", "0.2", "training patches detached for validation"},
        {"patch_side", "64", "patch side"},
        {"patch_stride", "64", "patch stride"},
        {"min_foreground", "0.05", "minimum patch foreground fraction"},
    };
    return keys;
}

RunConfig::RunConfig() {
    for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    it->second = value;
    explicit_[key] = true;
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open config " + path.string());
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (!values_.count(key))
            throw Error(ErrorCode::ConfigError,
                        path.string() + ":" + std::to_string(lineno) + ": unknown config key '" + key + "'");
        set(key, trim(line.substr(eq + 1)));
    }
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    return it->second;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::ConfigError, "bad value '" + s + "' for " + key);
    return v;
}

}  // namespace

double RunConfig::get_double(const std::string& key) const { return parse_number<double>(key, get(key)); }
int RunConfig::get_int(const std::string& key) const { return parse_number<int>(key, get(key)); }
std::uint64_t RunConfig::get_u64(const std::string& key) const { return parse_number<std::uint64_t>(key, get(key)); }

Material RunConfig::material() const {
    Material m{get_double("eta"), parse_mode(get("mode"))};
    m.validate();
    return m;
}

FitMethod RunConfig::fit_method() const {
    const auto& f = get("fit");
    if (f == "lsq") return FitMethod::LeastSquares;
    if (f == "closed") return FitMethod::ClosedFormQuad;
    throw Error(ErrorCode::ConfigError, "fit must be lsq or closed, got '" + f + "'");
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& k : config_keys()) out += k.name + "=" + get(k.name) + "\n";
    return out;
}

ReflectionMode parse_mode(const std::string& s) {
    if (s == "diffuse") return ReflectionMode::Diffuse;
    if (s == "specular") return ReflectionMode::Specular;
    throw Error(ErrorCode::ConfigError, "mode must be diffuse or specular, got '" + s + "'");
}

DisambiguationPolicy parse_policy(const std::string& s) {
    if (s == "oracle") return OraclePolicy{};
    if (s == "convexity") return ConvexityPolicy{};
    if (s.rfind("fixed:", 0) == 0)
        return FixedBranchPolicy{static_cast<std::size_t>(parse_number<std::uint64_t>("policy", s.substr(6)))};
    throw Error(ErrorCode::ConfigError, "policy must be oracle, convexity or fixed:<i>, got '" + s + "'");
}

}  // namespace polsfp
