// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "polsfp/dataio.hpp"
#include "polsfp/error.hpp"

namespace fs = std::filesystem;

namespace polsfp {

namespace {

std::vector<std::uint8_t> read_png(const fs::path& path, png_uint_32 format, int& h, int& w) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw Error(ErrorCode::IoError, path.string() + ": " + image.message);
    image.format = format;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(ErrorCode::IoError, path.string() + ": " + image.message);
    }
    h = static_cast<int>(image.height);
    w = static_cast<int>(image.width);
    return pixels;
}

void write_png(const fs::path& path, png_uint_32 format, int h, int w, const std::vector<std::uint8_t>& pixels) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = format;
    if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr))
        throw Error(ErrorCode::IoError, path.string() + ": " + image.message);
}

}  // namespace

Mask read_mask_png(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::MissingFile, path.string());
    int h = 0, w = 0;
    const auto pixels = read_png(path, PNG_FORMAT_GRAY, h, w);
    Mask mask(h, w);
    for (std::size_t i = 0; i < pixels.size(); ++i) mask.bits[i] = pixels[i] >= 128 ? 1 : 0;
    return mask;
}

void write_mask_png(const Mask& mask, const fs::path& path) {
    std::vector<std::uint8_t> pixels(mask.bits.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = mask.bits[i] ? 255 : 0;
    write_png(path, PNG_FORMAT_GRAY, mask.height, mask.width, pixels);
}

void write_normals_png(const NormalMap& normals, const fs::path& path) {
    std::vector<std::uint8_t> pixels(normals.normals.size() * 3, 0);
    auto encode = [](double c) {
        const double v = std::round((c + 1.0) / 2.0 * 255.0);
        return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    };
    for (int y = 0; y < normals.height; ++y) {
        for (int x = 0; x < normals.width; ++x) {
            if (!normals.mask.at(y, x)) continue;
            const std::size_t i = static_cast<std::size_t>(y) * normals.width + x;
            const Vec3& n = normals.normals[i];
            pixels[3 * i] = encode(n.x);
            pixels[3 * i + 1] = encode(n.y);
            pixels[3 * i + 2] = encode(n.z);
        }
    }
    write_png(path, PNG_FORMAT_RGB, normals.height, normals.width, pixels);
}

}  // namespace polsfp
