// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "polsfp/error.hpp"

namespace polsfp {

MaeDetail mae_detail(const NormalMap& pred, const NormalMap& truth, const Mask& mask) {
    if (pred.height != truth.height || pred.width != truth.width || mask.height != truth.height ||
        mask.width != truth.width)
        throw Error(ErrorCode::DimensionMismatch, "prediction, truth and mask sizes disagree");
    MaeDetail d;
    double sum = 0.0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(y, x)) continue;
            ++d.pixels;
            const Vec3 p = pred.at(y, x);
            const double len = norm(p);
            if (!(len > 0.0) || !std::isfinite(len)) {
                ++d.zero_length;
                sum += 90.0;
                continue;
            }
            // atan2 stays accurate near 0 and 180 where acos loses half the digits;
            // dividing by pi first keeps 90 and 180 exact
            const Vec3& n = truth.at(y, x);
            const Vec3 cross{p.y * n.z - p.z * n.y, p.z * n.x - p.x * n.z, p.x * n.y - p.y * n.x};
            sum += 180.0 * (std::atan2(norm(cross), dot(p, n)) / kPi);
        }
    }
    if (d.pixels == 0) throw Error(ErrorCode::EmptyMask, "mask selects no pixels");
    d.degrees = sum / static_cast<double>(d.pixels);
    return d;
}

double mae(const NormalMap& pred, const NormalMap& truth, const Mask& mask) {
    return mae_detail(pred, truth, mask).degrees;
}

namespace {

struct Acc {
    double weighted = 0.0;
    std::size_t pixels = 0;

    void add(const SampleMae& s) {
        weighted += s.mae_deg * static_cast<double>(s.pixels);
        pixels += s.pixels;
    }
    std::optional<double> mean() const {
        if (pixels == 0) return std::nullopt;
        return weighted / static_cast<double>(pixels);
    }
};

std::string fmt(std::optional<double> v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

}  // namespace

MaeReport MaeReport::from_samples(std::vector<SampleMae> samples) {
    std::sort(samples.begin(), samples.end(), [](const SampleMae& a, const SampleMae& b) {
        if (a.object_id != b.object_id) return a.object_id < b.object_id;
        if (a.condition != b.condition) return a.condition < b.condition;
        return a.view < b.view;
    });
    MaeReport r;
    Acc whole, cond[3];
    std::map<std::string, std::vector<const SampleMae*>> groups;
    for (const auto& s : samples) {
        whole.add(s);
        cond[static_cast<int>(s.condition)].add(s);
        r.zero_length += s.zero_length;
        groups[s.object_id].push_back(&s);
    }
    for (const auto& [id, list] : groups) {
        ObjectMae o;
        o.object_id = id;
        Acc all, by[3];
        double sample_sum = 0.0;
        for (const auto* s : list) {
            all.add(*s);
            by[static_cast<int>(s->condition)].add(*s);
            sample_sum += s->mae_deg;
        }
        o.samples = list.size();
        o.sample_mean = sample_sum / static_cast<double>(list.size());
        o.pixel_weighted = all.mean().value_or(0.0);
        o.pixels = all.pixels;
        for (int c = 0; c < 3; ++c) o.by_condition[c] = by[c].mean();
        r.per_object.push_back(o);
    }
    for (int c = 0; c < 3; ++c) r.by_condition[c] = cond[c].mean();
    r.whole_set = whole.mean().value_or(0.0);
    r.pixels = whole.pixels;
    r.per_sample = std::move(samples);
    return r;
}

std::string format_table(const MaeReport& report, const std::string& title) {
    std::string out;
    char line[256];
    out += "# " + title + "\n";
    out += "# MAE in degrees. Condition columns, 'pixels' and Whole Set are pixel-weighted means over\n";
    out += "# foreground pixels; 'samples' weights every sample equally.\n";
    std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %9s %9s %10s\n", "object", "indoor", "sunny", "cloudy",
                  "samples", "pixels", "n_pixels");
    out += line;
    for (const auto& o : report.per_object) {
        std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %9s %9s %10zu\n", o.object_id.c_str(),
                      fmt(o.by_condition[0]).c_str(), fmt(o.by_condition[1]).c_str(), fmt(o.by_condition[2]).c_str(),
                      fmt(o.sample_mean).c_str(), fmt(o.pixel_weighted).c_str(), o.pixels);
        out += line;
    }
    double sample_mean = 0.0;
    for (const auto& s : report.per_sample) sample_mean += s.mae_deg;
    std::optional<double> all_samples;
    if (!report.per_sample.empty()) all_samples = sample_mean / static_cast<double>(report.per_sample.size());
    std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %9s %9s %10zu\n", "Whole Set", fmt(report.by_condition[0]).c_str(),
                  fmt(report.by_condition[1]).c_str(), fmt(report.by_condition[2]).c_str(), fmt(all_samples).c_str(),
                  fmt(report.whole_set).c_str(), report.pixels);
    out += line;
    if (report.zero_length > 0) out += "# zero-length predictions scored as 90 deg: " + std::to_string(report.zero_length) + "\n";
    return out;
}

std::string format_csv(const MaeReport& report) {
    std::string out = "object,condition,view,mae_deg,pixels\n";
    char line[256];
    for (const auto& s : report.per_sample) {
        std::snprintf(line, sizeof line, "%s,%s,%s,%.17g,%zu\n", s.object_id.c_str(),
                      std::string(to_string(s.condition)).c_str(), std::string(to_string(s.view)).c_str(), s.mae_deg,
                      s.pixels);
        out += line;
    }
    return out;
}

}  // namespace polsfp
