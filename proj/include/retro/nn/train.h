//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "retro/nn/model.h"

namespace retro::nn {

class NonFiniteLoss: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Adam moments, one pair per model tensor.
template<class T>
struct OptimizerState {
  std::vector<Matrix<T>> first, second;
  long step = 0;

  static OptimizerState zeros_like(const Seq2Seq<T> &model);
};

struct StepStats {
  double loss = 0;
  double grad_norm = 0;
  double clipped_norm = 0;
  // Largest |sum of attention weights - 1| seen during the step.
  double attention_deviation = 0;
};

/**
 * One Adam update on a batch: teacher-forced loss, backpropagation through
 * the unrolled network, global-norm clipping to cfg.max_grad_norm, then the
 * bias-corrected Adam step. Throws NonFiniteLoss before touching the
 * parameters when the loss or a gradient is not finite.
 */
template<class T>
StepStats train_step(Seq2Seq<T> &model, OptimizerState<T> &opt, const std::vector<SeqPair> &batch,
                     std::mt19937_64 *dropout_rng);

/// exp(total NLL / total tokens) over `pairs`, without dropout.
template<class T>
double perplexity(const Seq2Seq<T> &model, const std::vector<SeqPair> &pairs, int batch_size);

struct FitOptions {
  long max_steps = 100000;
  int eval_interval = 4000;
  // Consecutive evaluations worse than the previous one before stopping.
  int patience = 1;
  std::function<void(long step, const StepStats &)> on_step;
};

/// Stop rule: stop once `patience` consecutive evaluations each came out
/// worse than the one before.
class EarlyStopping {
public:
  explicit EarlyStopping(int patience): patience_(patience) { }
  /// Records one validation perplexity; true means stop now.
  bool observe(double perplexity);

private:
  int patience_;
  int worse_ = 0;
  double previous_ = INFINITY;
};

struct EvalPoint {
  long step = 0;
  // Mean batch loss since the previous evaluation.
  double train_loss = 0;
  double valid_perplexity = 0;
};

struct FitResult {
  std::vector<EvalPoint> log;
  long steps = 0;
  long best_step = 0;
  double best_perplexity = 0;
  bool stopped_early = false;
};

/**
 * Trains from the model's current weights. Batches come from reshuffled
 * passes over `train`, seeded from cfg.rng_seed. On return the model and
 * optimiser hold the state of the best-perplexity evaluation (or the final
 * state when no evaluation ran).
 */
template<class T>
FitResult fit(Seq2Seq<T> &model, OptimizerState<T> &opt, const std::vector<SeqPair> &train,
              const std::vector<SeqPair> &valid, const FitOptions &options);

/// step,train_loss,valid_perplexity
void write_training_log(const std::filesystem::path &path, const std::vector<EvalPoint> &log);

}  // namespace retro::nn
