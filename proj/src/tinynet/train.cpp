// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include "polsfp/tinynet/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "polsfp/error.hpp"
#include "polsfp/tinynet/adam.hpp"
#include "polsfp/tinynet/ops.hpp"

namespace polsfp::tinynet {

namespace {

void check_patches(const std::vector<Patch>& patches) {
    if (patches.empty()) return;
    const int side = patches.front().side;
    for (const auto& p : patches) {
        const auto area = static_cast<std::size_t>(p.side) * p.side;
        if (p.side != side || p.side <= 0 || p.stack.size() != area * 4 || p.normals.size() != area * 3 ||
            p.mask.size() != area)
            throw Error(ErrorCode::DataError, "malformed patch from object '" + p.object_id + "'");
    }
}

std::vector<const Patch*> slice(const std::vector<Patch>& patches, const std::vector<std::size_t>& order,
                                std::size_t begin, std::size_t end) {
    std::vector<const Patch*> out;
    for (std::size_t i = begin; i < end; ++i) out.push_back(&patches[order[i]]);
    return out;
}

template <typename T>
Tensor to_nchw(const std::vector<const Patch*>& patches, int channels, const std::vector<T> Patch::*field) {
    const int n = static_cast<int>(patches.size());
    const int s = patches.front()->side;
    const std::size_t plane = static_cast<std::size_t>(s) * s;
    Tensor t({n, channels, s, s});
    auto v = t.values();
    for (int i = 0; i < n; ++i) {
        const auto& src = patches[i]->*field;
        for (std::size_t q = 0; q < plane; ++q)
            for (int c = 0; c < channels; ++c)
                v[(static_cast<std::size_t>(i) * channels + c) * plane + q] = src[q * channels + c];
    }
    return t;
}

std::size_t count_mask(const std::vector<std::uint8_t>& m) {
    return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](auto b) { return b != 0; }));
}

}  // namespace

Tensor batch_input(const std::vector<const Patch*>& patches) { return to_nchw(patches, 4, &Patch::stack); }
Tensor batch_target(const std::vector<const Patch*>& patches) { return to_nchw(patches, 3, &Patch::normals); }

std::vector<std::uint8_t> batch_mask(const std::vector<const Patch*>& patches) {
    std::vector<std::uint8_t> m;
    for (const auto* p : patches) m.insert(m.end(), p->mask.begin(), p->mask.end());
    return m;
}

double evaluate_loss(UNet& net, const std::vector<Patch>& patches, int batch_size) {
    check_patches(patches);
    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), 0);
    net.set_requires_grad(false);
    double total = 0.0;
    std::size_t pixels = 0;
    for (std::size_t b = 0; b < patches.size(); b += static_cast<std::size_t>(batch_size)) {
        const auto batch = slice(patches, order, b, std::min(patches.size(), b + batch_size));
        const auto mask = batch_mask(batch);
        const std::size_t count = count_mask(mask);
        if (count == 0) continue;
        const Tensor loss = cosine_loss(net.forward(batch_input(batch)), batch_target(batch), mask);
        total += loss.item() * static_cast<double>(count);
        pixels += count;
    }
    net.set_requires_grad(true);
    return pixels ? total / static_cast<double>(pixels) : 0.0;
}

TrainResult train(const UNetConfig& config, const std::vector<Patch>& train_set, const std::vector<Patch>& val_set,
                  const TrainOptions& options) {
    if (train_set.empty()) throw Error(ErrorCode::DataError, "no training patches");
    if (options.batch_size < 1) throw Error(ErrorCode::ConfigError, "batch size must be >= 1");
    check_patches(train_set);
    check_patches(val_set);
    if (!val_set.empty() && val_set.front().side != train_set.front().side)
        throw Error(ErrorCode::DataError, "train and validation patch sizes differ");

    UNet net(config);
    const std::vector<Patch>& selection_set = val_set.empty() ? train_set : val_set;
    TrainResult result{net.clone(), {}, evaluate_loss(net, selection_set, options.batch_size), 0};
    double best_loss = result.initial_val_loss;

    std::vector<Tensor> params;
    for (auto& p : net.params()) params.push_back(p.tensor);
    AdamState adam;
    adam.learning_rate = options.learning_rate;

    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    const auto batch = static_cast<std::size_t>(options.batch_size);

    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        std::size_t pixels = 0;
        for (std::size_t b = 0; b < order.size(); b += batch) {
            const auto items = slice(train_set, order, b, std::min(order.size(), b + batch));
            const auto mask = batch_mask(items);
            const std::size_t count = count_mask(mask);
            if (count == 0) continue;
            const Tensor data = cosine_loss(net.forward(batch_input(items)), batch_target(items), mask);
            Tensor loss = config.l2_factor > 0.0 ? add(data, net.l2_penalty()) : data;
            net.zero_grad();
            loss.backward();
            adam_step(adam, params);
            total += data.item() * static_cast<double>(count);
            pixels += count;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = pixels ? total / static_cast<double>(pixels) : 0.0;
        rec.val_loss = evaluate_loss(net, selection_set, options.batch_size);
        result.history.push_back(rec);
        if (rec.val_loss < best_loss) {
            best_loss = rec.val_loss;
            result.best = net.clone();
            result.best_epoch = epoch;
        }
        if (options.on_epoch) options.on_epoch(rec);
    }
    return result;
}

TrainResult train(const UNetConfig& config, const std::vector<Patch>& patches, double val_fraction,
                  const TrainOptions& options) {
    if (!(val_fraction >= 0.0 && val_fraction < 1.0))
        throw Error(ErrorCode::DomainError, "val_fraction must lie in [0, 1)");
    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(options.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(patches.size())));
    std::vector<Patch> train_set, val_set;
    for (std::size_t i = 0; i < order.size(); ++i) (i < n_val ? val_set : train_set).push_back(patches[order[i]]);
    return train(config, train_set, val_set, options);
}

std::string format_history_csv(const std::vector<EpochRecord>& history) {
    std::string out = "epoch,train_loss,val_loss\n";
    char line[96];
    for (const auto& r : history) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g\n", r.epoch, r.train_loss, r.val_loss);
        out += line;
    }
    return out;
}

NormalMap infer_normals(UNet& net, const PolarizedStack& stack, const Mask& mask) {
    if (mask.height != stack.height || mask.width != stack.width)
        throw Error(ErrorCode::DimensionMismatch, "mask and stack sizes disagree");
    if (static_cast<int>(stack.channels()) != net.config().in_channels)
        throw Error(ErrorCode::ShapeMismatch, "stack channel count does not match the network");
    const int m = net.config().patch_multiple();
    const int h = stack.height, w = stack.width;
    const int hp = (h + m - 1) / m * m, wp = (w + m - 1) / m * m;
    const int c = static_cast<int>(stack.channels());
    const std::size_t plane = static_cast<std::size_t>(hp) * wp;

    Tensor input({1, c, hp, wp});
    auto v = input.values();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int k = 0; k < c; ++k) v[k * plane + static_cast<std::size_t>(y) * wp + x] = stack.at(y, x, k);

    net.set_requires_grad(false);
    const Tensor out = net.forward(input);
    net.set_requires_grad(true);

    NormalMap result(h, w);
    result.mask = mask;
    const auto o = out.values();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(y, x)) continue;
            const std::size_t q = static_cast<std::size_t>(y) * wp + x;
            const Vec3 p{o[q], o[plane + q], o[2 * plane + q]};
            const double len = norm(p);
            result.at(y, x) = len > 0.0 ? Vec3{p.x / len, p.y / len, p.z / len} : Vec3{};
        }
    }
    return result;
}

}  // namespace polsfp::tinynet
