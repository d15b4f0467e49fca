//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/nn/config.h"

#include <string>

namespace retro::nn {

void Seq2SeqConfig::validate() const {
  auto positive = [](int v, const char *name) {
    if (v <= 0)
      throw ConfigError(std::string(name) + " must be positive, got " + std::to_string(v));
  };
  positive(vocab_size, "vocab_size");
  positive(embedding_dim, "embedding_dim");
  positive(hidden_dim, "hidden_dim");
  positive(encoder_layers, "encoder_layers");
  positive(decoder_layers, "decoder_layers");
  positive(attention_dim, "attention_dim");
  positive(max_seq_len, "max_seq_len");
  positive(max_decode_len, "max_decode_len");
  positive(batch_size, "batch_size");
  if (!(dropout_keep > 0 && dropout_keep <= 1))
    throw ConfigError("dropout_keep must lie in (0, 1], got " + std::to_string(dropout_keep));
  if (!(learning_rate >= 0))
    throw ConfigError("learning_rate must be non-negative");
  if (!(max_grad_norm > 0))
    throw ConfigError("max_grad_norm must be positive");
}

nlohmann::ordered_json to_json(const Seq2SeqConfig &c) {
  nlohmann::ordered_json j;
  j["vocab_size"] = c.vocab_size;
  j["embedding_dim"] = c.embedding_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["encoder_layers"] = c.encoder_layers;
  j["decoder_layers"] = c.decoder_layers;
  j["attention_dim"] = c.attention_dim;
  j["dropout_keep"] = c.dropout_keep;
  j["dropout_embeddings"] = c.dropout_embeddings;
  j["max_seq_len"] = c.max_seq_len;
  j["max_decode_len"] = c.max_decode_len;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["max_grad_norm"] = c.max_grad_norm;
  j["rng_seed"] = c.rng_seed;
  return j;
}

Seq2SeqConfig config_from_json(const nlohmann::json &j, Seq2SeqConfig c) {
  auto get = [&j](const char *key, auto &field) {
    if (j.contains(key))
      field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("vocab_size", c.vocab_size);
  get("embedding_dim", c.embedding_dim);
  get("hidden_dim", c.hidden_dim);
  get("encoder_layers", c.encoder_layers);
  get("decoder_layers", c.decoder_layers);
  get("attention_dim", c.attention_dim);
  get("dropout_keep", c.dropout_keep);
  get("dropout_embeddings", c.dropout_embeddings);
  get("max_seq_len", c.max_seq_len);
  get("max_decode_len", c.max_decode_len);
  get("batch_size", c.batch_size);
  get("learning_rate", c.learning_rate);
  get("max_grad_norm", c.max_grad_norm);
  get("rng_seed", c.rng_seed);
  return c;
}

}  // namespace retro::nn
