// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// On-disk formats and dataset handling.
//
// PSFP raster: the 6-byte magic "PSFP1\n", one ASCII header line
// "dtype=f32 dims=<H> <W> <C>\n", then H*W*C little-endian reals, row-major
// and channel-last. dtype=f64 is accepted as well (used for checkpoints).
//
// Dataset layout: <root>/<object_id>/<condition>/<view>/ holding stack.psfp
// (H x W x 4, polarizer angles 0/45/90/135), normals.psfp (H x W x 3) and
// mask.png (8-bit gray, 0 background, 255 foreground). An optional split
// file lists "object_id<TAB>train|test" per line.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "polsfp/normal_map.hpp"
#include "polsfp/polcore.hpp"

namespace polsfp {

enum class RasterType { F32, F64 };

struct Raster {
    int height = 0;
    int width = 0;
    int channels = 0;
    RasterType dtype = RasterType::F32;
    std::vector<double> values;

    Raster() = default;
    Raster(int h, int w, int c, RasterType type = RasterType::F32)
        : height(h), width(w), channels(c), dtype(type),
          values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(c), 0.0) {}

    double& at(int y, int x, int c) {
        return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const Raster&, const Raster&) = default;
};

/// f32 rasters store values rounded to single precision; the writer throws
/// DomainError for non-finite values.
void write_raster(std::ostream& out, const Raster& raster);
void write_raster(const Raster& raster, const std::filesystem::path& path);

/// Throws BadMagic, HeaderParse or TruncatedPayload. The path overload also
/// rejects trailing bytes after the payload.
Raster read_raster(std::istream& in, const std::string& source);
Raster read_raster(const std::filesystem::path& path);

Raster stack_to_raster(const PolarizedStack& stack);
PolarizedStack raster_to_stack(const Raster& raster);
Raster normals_to_raster(const NormalMap& normals);

enum class LightingCondition { Indoor, Sunny, Cloudy };
enum class View { Front, Back, Left, Right };

std::string_view to_string(LightingCondition c);
std::string_view to_string(View v);
std::optional<LightingCondition> parse_condition(std::string_view s);
std::optional<View> parse_view(std::string_view s);

struct SampleRecord {
    std::string object_id;
    LightingCondition condition = LightingCondition::Indoor;
    View view = View::Front;
    PolarizedStack stack;
    NormalMap normals;  // normals.mask is the foreground mask

    const Mask& mask() const { return normals.mask; }
};

/// Throws MissingFile, DimensionMismatch or NonUnitNormals. Normals within
/// 1e-3 of unit length on the mask are renormalized; those already unit to
/// single precision are kept as stored. Object, condition and view come from
/// the trailing <object>/<condition>/<view> path components when they parse.
SampleRecord load_sample(const std::filesystem::path& dir);

void write_sample(const SampleRecord& sample, const std::filesystem::path& dir);
std::filesystem::path sample_dir(const std::filesystem::path& root, const std::string& object_id,
                                 LightingCondition condition, View view);

struct SampleRef {
    std::string object_id;
    LightingCondition condition = LightingCondition::Indoor;
    View view = View::Front;
    std::filesystem::path dir;
};

/// All sample directories under root in sorted (object, condition, view)
/// order. Throws MissingFile when root does not exist.
std::vector<SampleRef> scan_dataset(const std::filesystem::path& root);

/// Mask PNG I/O (8-bit gray). Pixels >= 128 read as foreground.
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const Mask& mask, const std::filesystem::path& path);

/// 8-bit RGB visualization, channel = round((n + 1) / 2 * 255); off-mask black.
void write_normals_png(const NormalMap& normals, const std::filesystem::path& path);

struct Patch {
    int side = 0;
    std::string object_id;
    std::vector<float> stack;    // side x side x 4
    std::vector<float> normals;  // side x side x 3
    std::vector<std::uint8_t> mask;

    std::size_t foreground() const;
};

struct PatchOptions {
    int side = 64;
    int stride = 64;
    double min_foreground = 0.05;
};

/// Raster-scan tiling; partial tiles at the right/bottom edges are dropped.
/// Throws SideTooLarge when the tile exceeds the image.
std::vector<Patch> extract_patches(const SampleRecord& sample, const PatchOptions& options = {});

struct SplitSpec {
    std::set<std::string> train_objects;
    std::set<std::string> test_objects;
    double val_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct PatchSplits {
    std::vector<Patch> train;
    std::vector<Patch> val;
    std::vector<Patch> test;
};

/// Splits by object; the validation set is floor(val_fraction * n) training
/// patches chosen by a seeded shuffle. Throws UnassignedObject or
/// OverlappingSets.
PatchSplits make_splits(const std::vector<SampleRecord>& samples, const SplitSpec& spec,
                        const PatchOptions& patch_options = {});

SplitSpec read_split_file(const std::filesystem::path& path);
void write_split_file(const SplitSpec& spec, const std::filesystem::path& path);

}  // namespace polsfp
