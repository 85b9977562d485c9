// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "polsfp/tinynet/tensor.hpp"

namespace polsfp::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("polsfp_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Every regular file under `root`, keyed by relative path, with contents.
inline std::vector<std::pair<std::string, std::string>> tree_contents(const std::filesystem::path& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out.emplace_back(std::filesystem::relative(e.path(), root).string(), read_bytes(e.path()));
    std::sort(out.begin(), out.end());
    return out;
}

inline tinynet::Tensor random_tensor(tinynet::Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(tinynet::shape_size(shape));
    for (auto& x : v) x = u(rng);
    return tinynet::Tensor(std::move(shape), std::move(v), true);
}

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

/// Central differences against the analytic gradient of the scalar `loss`
/// for the entries `indices` of each tensor in `inputs` (all entries when a
/// list is empty). Relative error uses max(|a|, |n|, floor) as denominator.
inline GradCheck grad_check(const std::function<tinynet::Tensor()>& loss, std::vector<tinynet::Tensor> inputs,
                            const std::vector<std::vector<std::size_t>>& indices = {}, double step = 1e-5,
                            double floor = 1e-6) {
    for (auto& t : inputs) t.zero_grad();
    loss().backward();
    GradCheck r;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        auto& t = inputs[i];
        std::vector<double> analytic(t.grad().begin(), t.grad().end());
        analytic.resize(t.size(), 0.0);
        std::vector<std::size_t> which;
        if (i < indices.size() && !indices[i].empty()) {
            which = indices[i];
        } else {
            which.resize(t.size());
            for (std::size_t k = 0; k < which.size(); ++k) which[k] = k;
        }
        auto v = t.values();
        for (std::size_t k : which) {
            const double saved = v[k];
            v[k] = saved + step;
            const double up = loss().item();
            v[k] = saved - step;
            const double down = loss().item();
            v[k] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), floor});
            r.max_rel_error = std::max(r.max_rel_error, std::abs(analytic[k] - numeric) / denom);
            ++r.checked;
        }
    }
    return r;
}

}  // namespace polsfp::testing
