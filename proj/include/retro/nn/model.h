//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "retro/data/vocab.h"
#include "retro/nn/config.h"
#include "retro/nn/tape.h"

namespace retro::nn {

struct SeqPair {
  data::TokenSeq src;
  // Ends with EOS.
  data::TokenSeq tgt;
};

/**
 * Attention encoder-decoder over token ids.
 *
 * Encoder: stacked bidirectional LSTMs; each position's output is the
 * forward and backward top-layer states side by side (2h wide).
 * Bridge: one affine map from the top layer's final [h_fwd, h_bwd, c_fwd,
 * c_bwd] to the initial (h, c) of every decoder layer.
 * Decoder: stacked LSTMs; layer 0 reads the previous token's embedding next
 * to the previous step's attention context. The logits come from an affine
 * map of [top state, context].
 *
 * Weights are drawn uniformly from +-1/sqrt(fan_in) (embeddings from
 * +-0.1); biases start at zero except the forget gates, which start at 1.
 */
template<class T>
class Seq2Seq {
public:
  using Mat = Matrix<T>;
  using Var = typename Tape<T>::Var;

  struct Tensor {
    std::string name;
    Mat value;
    mutable Mat grad;
  };

  /// Encoder output bound to one tape. Source s owns rows
  /// [offsets[s], offsets[s+1]) of keys and values.
  struct Encoded {
    std::vector<Var> params;
    Var keys = -1;
    Var values = -1;
    std::vector<int> offsets;
    std::vector<Var> h0, c0;
  };

  /// Decoder state for a batch of rows.
  struct State {
    std::vector<Var> h, c;
    Var context = -1;
  };

  struct Step {
    Var logits = -1;
    State next;
    // Per-row attention weights, filled when requested.
    std::vector<std::vector<T>> attention;
  };

  explicit Seq2Seq(const Seq2SeqConfig &cfg);

  const Seq2SeqConfig &config() const { return cfg_; }
  std::vector<Tensor> &tensors() { return tensors_; }
  const std::vector<Tensor> &tensors() const { return tensors_; }
  Tensor &tensor(const std::string &name);
  void zero_grad();

  /// `dropout_rng` null means no dropout.
  Encoded encode(Tape<T> &tape, const std::vector<data::TokenSeq> &srcs,
                 std::mt19937_64 *dropout_rng = nullptr) const;

  /// Initial decoder state for row b reading source src_of_row[b].
  State initial_state(Tape<T> &tape, const Encoded &enc, const std::vector<int> &src_of_row) const;

  Step decode_step(Tape<T> &tape, const Encoded &enc, const State &state,
                   const std::vector<int> &prev_tokens, const std::vector<int> &src_of_row,
                   std::mt19937_64 *dropout_rng = nullptr, bool want_attention = false) const;

  /// Mean token negative log-likelihood of a batch under teacher forcing.
  /// `nll_sum` and `tokens` receive the unnormalized sum and the count.
  Var batch_loss(Tape<T> &tape, const std::vector<SeqPair> &batch,
                 std::mt19937_64 *dropout_rng = nullptr, double *nll_sum = nullptr,
                 long *tokens = nullptr) const;

  /// Top-layer encoder outputs of one source, len x 2h.
  Mat encoder_outputs(const data::TokenSeq &src) const;

  /// Mean token negative log-likelihood without dropout.
  double sequence_loss(const data::TokenSeq &src, const data::TokenSeq &tgt) const;

private:
  int add_tensor(std::string name, int rows, int cols);
  Var lstm_layer_step(Tape<T> &tape, const std::vector<Var> &p, int w, int b, Var x, Var h, Var c,
                      Var *c_out) const;
  Var dropout(Tape<T> &tape, Var x, std::mt19937_64 *rng) const;

  Seq2SeqConfig cfg_;
  std::vector<Tensor> tensors_;
  int embedding_ = -1;
  // [layer][direction]
  std::vector<std::array<int, 2>> enc_w_, enc_b_;
  int bridge_w_ = -1, bridge_b_ = -1;
  std::vector<int> dec_w_, dec_b_;
  int att_keys_ = -1, att_query_ = -1, att_v_ = -1;
  int out_w_ = -1, out_b_ = -1;
};

extern template class Seq2Seq<float>;
extern template class Seq2Seq<double>;

}  // namespace retro::nn
