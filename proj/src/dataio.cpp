// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "polsfp/error.hpp"

namespace fs = std::filesystem;

namespace polsfp {

namespace {

constexpr char kMagic[] = "PSFP1\n";
constexpr std::size_t kMagicSize = 6;
constexpr std::size_t kMaxHeader = 256;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        std::reverse(b, b + sizeof(T));
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

std::size_t element_size(RasterType t) { return t == RasterType::F32 ? 4 : 8; }

bool parse_positive(const std::string& token, int& out) {
    if (token.empty() || token.size() > 9) return false;
    for (char c : token)
        if (c < '0' || c > '9') return false;
    out = std::stoi(token);
    return out > 0;
}

struct Header {
    RasterType dtype;
    int h, w, c;
};

Header parse_header(const std::string& line, const std::string& source) {
    // Exactly: dtype=<f32|f64> dims=<H> <W> <C>
    std::istringstream ss(line);
    std::string dtype, dims, hs, ws, cs, extra;
    ss >> dtype >> dims >> hs >> ws >> cs;
    auto fail = [&]() { return Error(ErrorCode::HeaderParse, source + ": malformed header '" + line + "'"); };
    if (ss >> extra) throw fail();
    Header hdr{};
    if (dtype == "dtype=f32")
        hdr.dtype = RasterType::F32;
    else if (dtype == "dtype=f64")
        hdr.dtype = RasterType::F64;
    else
        throw fail();
    if (dims.rfind("dims=", 0) != 0) throw fail();
    if (!parse_positive(dims.substr(5), hdr.h) || !parse_positive(hs, hdr.w) || !parse_positive(ws, hdr.c) ||
        !cs.empty())
        throw fail();
    // Canonical spacing only, so that write(read(x)) reproduces the bytes.
    const std::string canonical = dtype + " dims=" + std::to_string(hdr.h) + " " + std::to_string(hdr.w) + " " +
                                  std::to_string(hdr.c);
    if (canonical != line) throw fail();
    return hdr;
}

fs::path require_file(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::MissingFile, path.string());
    return path;
}

}  // namespace

void write_raster(std::ostream& out, const Raster& raster) {
    if (raster.height <= 0 || raster.width <= 0 || raster.channels <= 0)
        throw Error(ErrorCode::DimensionMismatch, "raster dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(raster.height) * raster.width * raster.channels;
    if (raster.values.size() != n) throw Error(ErrorCode::DimensionMismatch, "raster payload size mismatch");

    std::string payload(n * element_size(raster.dtype), '\0');
    for (std::size_t i = 0; i < n; ++i) {
        const double v = raster.values[i];
        if (raster.dtype == RasterType::F32) {
            const float f = to_little(static_cast<float>(v));
            if (!std::isfinite(static_cast<float>(v)))
                throw Error(ErrorCode::DomainError, "non-finite value in raster");
            std::memcpy(payload.data() + 4 * i, &f, 4);
        } else {
            if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "non-finite value in raster");
            const double d = to_little(v);
            std::memcpy(payload.data() + 8 * i, &d, 8);
        }
    }
    out.write(kMagic, kMagicSize);
    out << "dtype=" << (raster.dtype == RasterType::F32 ? "f32" : "f64") << " dims=" << raster.height << ' '
        << raster.width << ' ' << raster.channels << '\n';
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error(ErrorCode::IoError, "raster write failed");
}

void write_raster(const Raster& raster, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    write_raster(out, raster);
}

Raster read_raster(std::istream& in, const std::string& source) {
    char magic[kMagicSize];
    if (!in.read(magic, kMagicSize) || std::memcmp(magic, kMagic, kMagicSize) != 0)
        throw Error(ErrorCode::BadMagic, source);

    std::string line;
    char ch = 0;
    while (in.get(ch) && ch != '\n') {
        line.push_back(ch);
        if (line.size() > kMaxHeader) throw Error(ErrorCode::HeaderParse, source + ": header too long");
    }
    if (ch != '\n') throw Error(ErrorCode::HeaderParse, source + ": unterminated header");
    const Header hdr = parse_header(line, source);

    Raster r(hdr.h, hdr.w, hdr.c, hdr.dtype);
    const std::size_t n = r.values.size();
    std::string payload(n * element_size(hdr.dtype), '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size())
        throw Error(ErrorCode::TruncatedPayload, source + ": expected " + std::to_string(payload.size()) +
                                                     " payload bytes, got " + std::to_string(in.gcount()));
    for (std::size_t i = 0; i < n; ++i) {
        if (hdr.dtype == RasterType::F32) {
            float f;
            std::memcpy(&f, payload.data() + 4 * i, 4);
            r.values[i] = to_little(f);
        } else {
            double d;
            std::memcpy(&d, payload.data() + 8 * i, 8);
            r.values[i] = to_little(d);
        }
    }
    return r;
}

Raster read_raster(const fs::path& path) {
    std::ifstream in(require_file(path), std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    Raster r = read_raster(in, path.string());
    if (in.peek() != std::char_traits<char>::eof())
        throw Error(ErrorCode::TruncatedPayload, path.string() + ": trailing bytes after payload");
    return r;
}

Raster stack_to_raster(const PolarizedStack& stack) {
    Raster r(stack.height, stack.width, static_cast<int>(stack.channels()));
    r.values = stack.intensities;
    return r;
}

PolarizedStack raster_to_stack(const Raster& raster) {
    if (raster.channels != 4)
        throw Error(ErrorCode::DimensionMismatch,
                    "stack raster needs 4 channels, has " + std::to_string(raster.channels));
    PolarizedStack stack(raster.height, raster.width, canonical_angles());
    stack.intensities = raster.values;
    return stack;
}

Raster normals_to_raster(const NormalMap& normals) {
    Raster r(normals.height, normals.width, 3);
    for (std::size_t i = 0; i < normals.normals.size(); ++i) {
        r.values[3 * i] = normals.normals[i].x;
        r.values[3 * i + 1] = normals.normals[i].y;
        r.values[3 * i + 2] = normals.normals[i].z;
    }
    return r;
}

std::string_view to_string(LightingCondition c) {
    switch (c) {
    case LightingCondition::Indoor: return "indoor";
    case LightingCondition::Sunny: return "sunny";
    case LightingCondition::Cloudy: return "cloudy";
    }
    return "indoor";
}

std::string_view to_string(View v) {
    switch (v) {
    case View::Front: return "front";
    case View::Back: return "back";
    case View::Left: return "left";
    case View::Right: return "right";
    }
    return "front";
}

std::optional<LightingCondition> parse_condition(std::string_view s) {
    for (auto c : {LightingCondition::Indoor, LightingCondition::Sunny, LightingCondition::Cloudy})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

std::optional<View> parse_view(std::string_view s) {
    for (auto v : {View::Front, View::Back, View::Left, View::Right})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

fs::path sample_dir(const fs::path& root, const std::string& object_id, LightingCondition condition, View view) {
    return root / object_id / std::string(to_string(condition)) / std::string(to_string(view));
}

SampleRecord load_sample(const fs::path& dir) {
    const Raster stack_raster = read_raster(require_file(dir / "stack.psfp"));
    const Raster normal_raster = read_raster(require_file(dir / "normals.psfp"));
    const Mask mask = read_mask_png(require_file(dir / "mask.png"));

    const int h = stack_raster.height, w = stack_raster.width;
    if (normal_raster.height != h || normal_raster.width != w || mask.height != h || mask.width != w)
        throw Error(ErrorCode::DimensionMismatch, dir.string() + ": stack, normals and mask sizes disagree");
    if (normal_raster.channels != 3)
        throw Error(ErrorCode::DimensionMismatch, dir.string() + ": normals raster needs 3 channels");

    SampleRecord rec;
    const fs::path abs = dir.lexically_normal();
    auto it = abs.end();
    std::vector<std::string> parts;
    for (auto p = abs.begin(); p != it; ++p)
        if (!p->empty()) parts.push_back(p->string());
    rec.object_id = parts.empty() ? "sample" : parts.back();
    if (parts.size() >= 3) {
        auto cond = parse_condition(parts[parts.size() - 2]);
        auto view = parse_view(parts.back());
        if (cond && view) {
            rec.object_id = parts[parts.size() - 3];
            rec.condition = *cond;
            rec.view = *view;
        }
    }

    rec.stack = raster_to_stack(stack_raster);
    rec.stack.validate();

    rec.normals = NormalMap(h, w);
    rec.normals.mask = mask;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(y, x)) continue;
            Vec3 n{normal_raster.at(y, x, 0), normal_raster.at(y, x, 1), normal_raster.at(y, x, 2)};
            const double len = norm(n);
            if (!(std::fabs(len - 1.0) <= 1e-3))
                throw Error(ErrorCode::NonUnitNormals, dir.string() + ": normal at (" + std::to_string(y) + ", " +
                                                           std::to_string(x) + ") has length " +
                                                           std::to_string(len));
            if (std::fabs(len - 1.0) > 1e-6) n = normalized(n);
            rec.normals.at(y, x) = n;
        }
    }
    return rec;
}

void write_sample(const SampleRecord& sample, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    write_raster(stack_to_raster(sample.stack), dir / "stack.psfp");
    write_raster(normals_to_raster(sample.normals), dir / "normals.psfp");
    write_mask_png(sample.mask(), dir / "mask.png");
}

std::vector<SampleRef> scan_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw Error(ErrorCode::MissingFile, "dataset root " + root.string());
    std::vector<SampleRef> refs;
    for (const auto& obj : fs::directory_iterator(root)) {
        if (!obj.is_directory()) continue;
        for (const auto& cond : fs::directory_iterator(obj.path())) {
            auto c = parse_condition(cond.path().filename().string());
            if (!cond.is_directory() || !c) continue;
            for (const auto& view : fs::directory_iterator(cond.path())) {
                auto v = parse_view(view.path().filename().string());
                if (!view.is_directory() || !v) continue;
                if (!fs::exists(view.path() / "stack.psfp")) continue;
                refs.push_back({obj.path().filename().string(), *c, *v, view.path()});
            }
        }
    }
    std::sort(refs.begin(), refs.end(), [](const SampleRef& a, const SampleRef& b) {
        if (a.object_id != b.object_id) return a.object_id < b.object_id;
        if (a.condition != b.condition) return a.condition < b.condition;
        return a.view < b.view;
    });
    return refs;
}

std::size_t Patch::foreground() const {
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto b) { return b != 0; }));
}

std::vector<Patch> extract_patches(const SampleRecord& sample, const PatchOptions& options) {
    const int h = sample.stack.height, w = sample.stack.width;
    const int side = options.side;
    if (side <= 0 || options.stride <= 0) throw Error(ErrorCode::DomainError, "patch side and stride must be positive");
    if (side > h || side > w)
        throw Error(ErrorCode::SideTooLarge,
                    "patch side " + std::to_string(side) + " exceeds " + std::to_string(h) + "x" + std::to_string(w));
    if (sample.stack.channels() != 4) throw Error(ErrorCode::DimensionMismatch, "patches need a 4-channel stack");

    std::vector<Patch> patches;
    const std::size_t area = static_cast<std::size_t>(side) * side;
    for (int y0 = 0; y0 + side <= h; y0 += options.stride) {
        for (int x0 = 0; x0 + side <= w; x0 += options.stride) {
            std::size_t fg = 0;
            for (int y = y0; y < y0 + side; ++y)
                for (int x = x0; x < x0 + side; ++x) fg += sample.mask().at(y, x);
            if (static_cast<double>(fg) < options.min_foreground * static_cast<double>(area)) continue;

            Patch p;
            p.side = side;
            p.object_id = sample.object_id;
            p.stack.resize(area * 4);
            p.normals.resize(area * 3);
            p.mask.resize(area);
            for (int y = 0; y < side; ++y) {
                for (int x = 0; x < side; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * side + x;
                    for (int k = 0; k < 4; ++k) p.stack[4 * i + k] = static_cast<float>(sample.stack.at(y0 + y, x0 + x, k));
                    const Vec3& n = sample.normals.at(y0 + y, x0 + x);
                    p.normals[3 * i] = static_cast<float>(n.x);
                    p.normals[3 * i + 1] = static_cast<float>(n.y);
                    p.normals[3 * i + 2] = static_cast<float>(n.z);
                    p.mask[i] = sample.mask().at(y0 + y, x0 + x) ? 1 : 0;
                }
            }
            patches.push_back(std::move(p));
        }
    }
    return patches;
}

PatchSplits make_splits(const std::vector<SampleRecord>& samples, const SplitSpec& spec,
                        const PatchOptions& patch_options) {
    for (const auto& id : spec.train_objects)
        if (spec.test_objects.count(id))
            throw Error(ErrorCode::OverlappingSets, "object '" + id + "' is in both train and test");
    if (!(spec.val_fraction >= 0.0 && spec.val_fraction < 1.0))
        throw Error(ErrorCode::DomainError, "val_fraction must lie in [0, 1)");

    PatchSplits out;
    std::vector<Patch> train;
    for (const auto& s : samples) {
        const bool in_train = spec.train_objects.count(s.object_id) > 0;
        const bool in_test = spec.test_objects.count(s.object_id) > 0;
        if (!in_train && !in_test)
            throw Error(ErrorCode::UnassignedObject, "object '" + s.object_id + "' is in neither split");
        auto patches = extract_patches(s, patch_options);
        auto& dst = in_train ? train : out.test;
        for (auto& p : patches) dst.push_back(std::move(p));
    }

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * static_cast<double>(train.size())));
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& dst = i < n_val ? out.val : out.train;
        dst.push_back(std::move(train[order[i]]));
    }
    return out;
}

SplitSpec read_split_file(const fs::path& path) {
    std::ifstream in(require_file(path));
    SplitSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(ErrorCode::DataError, path.string() + ":" + std::to_string(lineno) + ": expected object<TAB>split");
        const std::string id = line.substr(0, tab);
        const std::string which = line.substr(tab + 1);
        std::set<std::string>* dst = nullptr;
        if (which == "train")
            dst = &spec.train_objects;
        else if (which == "test")
            dst = &spec.test_objects;
        else
            throw Error(ErrorCode::DataError, path.string() + ":" + std::to_string(lineno) + ": unknown split '" + which + "'");
        dst->insert(id);
    }
    for (const auto& id : spec.train_objects)
        if (spec.test_objects.count(id))
            throw Error(ErrorCode::OverlappingSets, "object '" + id + "' is in both train and test");
    return spec;
}

void write_split_file(const SplitSpec& spec, const fs::path& path) {
    std::map<std::string, std::string> rows;
    for (const auto& id : spec.train_objects) rows[id] = "train";
    for (const auto& id : spec.test_objects) rows[id] = "test";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    for (const auto& [id, which] : rows) out << id << '\t' << which << '\n';
}

}  // namespace polsfp
