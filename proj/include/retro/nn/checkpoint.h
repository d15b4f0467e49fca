//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <stdexcept>

#include "retro/nn/train.h"

namespace retro::nn {

class VersionMismatch: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Seq2Seq<float> model;
  OptimizerState<float> optimizer;
};

/**
 * A checkpoint is a directory holding manifest.json (format tag, version,
 * config, optimiser step, tensor names, shapes and byte offsets) and
 * tensors.bin (row-major little-endian float32: the weights, then the Adam
 * first and second moments).
 */
void save_checkpoint(const Seq2Seq<float> &model, const OptimizerState<float> &opt,
                     const std::filesystem::path &dir);

/**
 * Throws data::IoError when files are missing, data::FormatError for a
 * malformed manifest or blob, VersionMismatch for a foreign format tag or
 * version, and ShapeMismatch when a tensor disagrees with the config (or,
 * when `expected` is given, with that config's shapes).
 */
Checkpoint load_checkpoint(const std::filesystem::path &dir, const Seq2SeqConfig *expected = nullptr);

}  // namespace retro::nn
