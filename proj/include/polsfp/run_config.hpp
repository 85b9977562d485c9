// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Flat key=value run configuration shared by every CLI verb. Blank lines and
// lines starting with '#' are ignored; unknown keys are errors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "polsfp/fresnel.hpp"
#include "polsfp/polcore.hpp"
#include "polsfp/sfp_physics.hpp"

namespace polsfp {

struct ConfigKey {
    std::string name;
    std::string default_value;
    std::string help;
};

/// Every recognized key with its default.
const std::vector<ConfigKey>& config_keys();

class RunConfig {
public:
    RunConfig();

    /// Throws ConfigError for unknown keys.
    void set(const std::string& key, const std::string& value);
    bool is_set(const std::string& key) const { return explicit_.count(key) > 0; }

    /// Throws MissingFile or ConfigError (with file:line).
    void load_file(const std::filesystem::path& path);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;

    Material material() const;
    FitMethod fit_method() const;
    std::string to_text() const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> explicit_;
};

ReflectionMode parse_mode(const std::string& s);

/// "oracle", "convexity" or "fixed:<i>". Oracle and convexity policies carry
/// no data here; the caller fills in the reference or the object centre.
DisambiguationPolicy parse_policy(const std::string& s);

}  // namespace polsfp
