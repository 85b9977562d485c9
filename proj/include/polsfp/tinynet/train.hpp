// Copyright 2026 The polsfp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "polsfp/dataio.hpp"
#include "polsfp/normal_map.hpp"
#include "polsfp/polcore.hpp"
#include "polsfp/tinynet/unet.hpp"

namespace polsfp::tinynet {

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;  // cosine data term, pixel-weighted over the epoch
    double val_loss = 0.0;
};

struct TrainOptions {
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;  // batch shuffling
    std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
    UNet best;  // parameters with the lowest validation loss seen
    std::vector<EpochRecord> history;
    double initial_val_loss = 0.0;
    int best_epoch = 0;
};

/// Network input for a batch of patches: (N, 4, S, S) intensities.
Tensor batch_input(const std::vector<const Patch*>& patches);
Tensor batch_target(const std::vector<const Patch*>& patches);
std::vector<std::uint8_t> batch_mask(const std::vector<const Patch*>& patches);

/// Pixel-weighted cosine data term over a patch set, no gradient tracking.
double evaluate_loss(UNet& net, const std::vector<Patch>& patches, int batch_size = 32);

/// Throws DataError when `train_set` is empty or patches are malformed. With
/// an empty validation set the training loss drives model selection.
TrainResult train(const UNetConfig& config, const std::vector<Patch>& train_set, const std::vector<Patch>& val_set,
                  const TrainOptions& options);

/// Detaches `val_fraction` of `patches` by seeded shuffle, then trains.
TrainResult train(const UNetConfig& config, const std::vector<Patch>& patches, double val_fraction,
                  const TrainOptions& options);

/// `epoch,train_loss,val_loss` with a header row.
std::string format_history_csv(const std::vector<EpochRecord>& history);

/// Full-image inference. The stack is zero-padded up to a multiple of
/// 2^depth, predictions are cropped back and normalized to unit length on
/// the mask (zero-length predictions stay zero).
NormalMap infer_normals(UNet& net, const PolarizedStack& stack, const Mask& mask);

void save_checkpoint(const UNet& net, const std::filesystem::path& path);
UNet load_checkpoint(const std::filesystem::path& path);

}  // namespace polsfp::tinynet
