// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

// Checkpoint layout: `<path>` holds one f64 raster per parameter, in the
// network's parameter order; `<path>.cfg` holds the architecture as
// key=value lines followed by one `param=<name> <dims>` line per tensor.

#include <fstream>
#include <sstream>

#include "polsfp/dataio.hpp"
#include "polsfp/error.hpp"
#include "polsfp/tinynet/train.hpp"

namespace polsfp::tinynet {

namespace {

std::filesystem::path sidecar(const std::filesystem::path& path) {
    auto s = path;
    s += ".cfg";
    return s;
}

Raster to_raster(const Tensor& t) {
    const Shape& s = t.shape();
    Raster r;
    if (s.size() == 4) {
        r = Raster(s[0], s[1], s[2] * s[3], RasterType::F64);
    } else {
        r = Raster(static_cast<int>(t.size()), 1, 1, RasterType::F64);
    }
    auto v = t.values();
    r.values.assign(v.begin(), v.end());
    return r;
}

}  // namespace

void save_checkpoint(const UNet& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    for (const auto& p : net.params()) write_raster(out, to_raster(p.tensor));
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");

    std::ofstream cfg(sidecar(path));
    if (!cfg) throw Error(ErrorCode::IoError, "cannot write '" + sidecar(path).string() + "'");
    const auto& c = net.config();
    cfg.precision(17);
    cfg << "depth=" << c.depth << "\nbase_width=" << c.base_width << "\nin_channels=" << c.in_channels
        << "\nout_channels=" << c.out_channels << "\nblocks_per_stage=" << c.blocks_per_stage
        << "\nl2_factor=" << c.l2_factor << "\nseed=" << c.seed << "\n";
    for (const auto& p : net.params()) cfg << "param=" << p.name << " " << shape_string(p.tensor.shape()) << "\n";
}

UNet load_checkpoint(const std::filesystem::path& path) {
    std::ifstream cfg(sidecar(path));
    if (!cfg) throw Error(ErrorCode::MissingFile, "missing checkpoint config '" + sidecar(path).string() + "'");
    UNetConfig c;
    std::vector<std::string> names;
    std::string line;
    while (std::getline(cfg, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "malformed checkpoint line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "depth") c.depth = std::stoi(value);
            else if (key == "base_width") c.base_width = std::stoi(value);
            else if (key == "in_channels") c.in_channels = std::stoi(value);
            else if (key == "out_channels") c.out_channels = std::stoi(value);
            else if (key == "blocks_per_stage") c.blocks_per_stage = std::stoi(value);
            else if (key == "l2_factor") c.l2_factor = std::stod(value);
            else if (key == "seed") c.seed = std::stoull(value);
            else if (key == "param") names.push_back(value.substr(0, value.find(' ')));
            else throw Error(ErrorCode::ConfigError, "unknown checkpoint key '" + key + "'");
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ConfigError, "bad value for checkpoint key '" + key + "'");
        }
    }
    c.validate();
    UNet net(c);
    if (names.size() != net.params().size())
        throw Error(ErrorCode::ShapeMismatch, "checkpoint parameter count does not match its architecture");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "missing checkpoint '" + path.string() + "'");
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto& p = net.params()[i];
        if (names[i] != p.name) throw Error(ErrorCode::ShapeMismatch, "unexpected parameter '" + names[i] + "'");
        const Raster r = read_raster(in, path.string());
        const Raster expect = to_raster(p.tensor);
        if (r.height != expect.height || r.width != expect.width || r.channels != expect.channels)
            throw Error(ErrorCode::ShapeMismatch, "parameter '" + p.name + "' has the wrong dimensions");
        auto dst = p.tensor.values();
        std::copy(r.values.begin(), r.values.end(), dst.begin());
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw Error(ErrorCode::TruncatedPayload, "trailing bytes after checkpoint tensors");
    return net;
}

}  // namespace polsfp::tinynet
