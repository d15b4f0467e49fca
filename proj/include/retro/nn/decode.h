//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <vector>

#include "retro/nn/model.h"

namespace retro::nn {

struct Hypothesis {
  // Emitted tokens; ends with EOS when complete.
  data::TokenSeq tokens;
  // Sum of per-token log probabilities.
  double log_prob = 0;
  bool complete = false;
};

/// Log-softmax of every row, in double.
template<class T>
Eigen::MatrixXd log_softmax_rows(const Matrix<T> &logits);

/// Highest-probability token at every step (ties go to the lower id); PAD
/// and BOS are never emitted. max_len 0 means cfg.max_decode_len.
template<class T>
Hypothesis greedy_decode(const Seq2Seq<T> &model, const data::TokenSeq &src, int max_len = 0);

/**
 * Beam search with raw summed log probability. Finished hypotheses stay in
 * the pool unchanged and compete with extensions for the `width` slots;
 * equal scores are ordered by token sequence. Stops once every kept
 * hypothesis is complete or max_len tokens were emitted. Returns the
 * complete hypotheses best first, or, when none completed, the incomplete
 * ones flagged as such.
 */
template<class T>
std::vector<Hypothesis> beam_decode(const Seq2Seq<T> &model, const data::TokenSeq &src, int width,
                                    int max_len = 0);

/// Teacher-forced log probability of `tokens` (which should end with EOS).
template<class T>
double sequence_log_prob(const Seq2Seq<T> &model, const data::TokenSeq &src,
                         const data::TokenSeq &tokens);

}  // namespace retro::nn
