//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <stdexcept>

#include <json.hpp>

namespace retro::nn {

class ConfigError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Model and optimiser hyperparameters. Defaults are the full-scale setting.
struct Seq2SeqConfig {
  int vocab_size = 0;
  int embedding_dim = 512;
  // Recurrent state size per direction; the full-scale setting ties it to
  // embedding_dim.
  int hidden_dim = 512;
  int encoder_layers = 2;
  int decoder_layers = 4;
  int attention_dim = 512;
  double dropout_keep = 0.8;
  // Also drop embedding outputs (off: dropout only sits between layers).
  bool dropout_embeddings = false;
  int max_seq_len = 140;
  int max_decode_len = 140;
  int batch_size = 32;
  double learning_rate = 1e-4;
  double max_grad_norm = 5.0;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

nlohmann::ordered_json to_json(const Seq2SeqConfig &cfg);

/// Fields absent from `j` keep the values already in `base`.
Seq2SeqConfig config_from_json(const nlohmann::json &j, Seq2SeqConfig base = {});

}  // namespace retro::nn
