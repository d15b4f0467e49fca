//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "retro/data/pipeline.h"
#include "retro/eval/metrics.h"
#include "retro/nn/config.h"
#include "retro/nn/train.h"
#include "retro/rules/rulebase.h"

namespace retro::app {

/// Settings shared by every stage. Each stage reads its inputs from and
/// writes its outputs to `out`, so the stages chain without extra paths.
struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path out = "run";
  data::SplitSpec split;
  nn::Seq2SeqConfig model;  // vocab_size comes from the vocabulary
  long max_steps = 100000;
  int eval_interval = 4000;
  int patience = 1;
  int beam_width = 50;
  std::vector<int> eval_ns = { 1, 3, 5, 10, 20, 50 };
  bool strict_valence = false;
  int workers = 1;
  std::optional<int> klass;     // restrict predict/evaluate to one class
  std::string model_kind = "seq2seq";
  std::optional<std::string> target;  // predict a single product instead of the test split

  chem::SmilesOptions smiles() const { return { strict_valence }; }
  /// Sets both the split seed and the model seed.
  void set_seed(std::uint64_t seed);
  /// Throws nn::ConfigError.
  void validate() const;
};

/**
 * Reads a JSON config. Recognised keys: split {ratios, seed, stratify},
 * model {Seq2SeqConfig fields}, train {max_steps, eval_interval, patience},
 * beam_width, eval_ns, strict_valence, workers. Unknown keys are rejected.
 */
RunConfig load_run_config(const std::filesystem::path &path);

data::PreprocessResult cmd_preprocess(const RunConfig &cfg);

struct RuleReport {
  rules::BuildStats stats;
  int unparsable = 0;
};
RuleReport cmd_extract_rules(const RunConfig &cfg);

nn::FitResult cmd_train(const RunConfig &cfg);

/// Writes predictions_<model>.jsonl (or returns the single-target result
/// without writing when cfg.target is set).
std::vector<eval::PredictionRecord> cmd_predict(const RunConfig &cfg);

/// Scores every predictions_*.jsonl present in `out` against test.jsonl.
std::vector<eval::MetricsReport> cmd_evaluate(const RunConfig &cfg);

/// Per-class count table in the layout of the dataset summary.
std::string class_count_table(const data::PreprocessResult &r);

}  // namespace retro::app
