//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "retro/data/reaction.h"
#include "retro/data/split.h"
#include "retro/data/vocab.h"

namespace retro::data {

/// One processed reaction as stored in the split files.
struct Example {
  std::string id;
  int klass = 0;
  std::string product_smiles;    // canonical, map-free
  std::string reactants_smiles;  // canonical, map-free, sorted components
  std::string mapped_reaction;   // "reactants>>product" with maps, for rule extraction
  // Token strings. Both empty when the record is over-length (kept only in
  // the test split, where prediction reports it).
  std::vector<std::string> src_tokens;
  std::vector<std::string> tgt_tokens;

  bool too_long() const { return src_tokens.empty(); }
};

Example make_example(const ReactionRecord &r);

/// Token strings to ids under `vocab` (unknown strings become <unk>).
TokenSeq token_ids(const std::vector<std::string> &tokens, const Vocab &vocab);

/// Source and target ids from the stored SMILES, re-tokenized under `vocab`.
/// Throws TooLong.
TokenSeq source_ids(const Example &ex, const Vocab &vocab);
TokenSeq target_ids(const Example &ex, const Vocab &vocab);

std::string to_jsonl_line(const Example &ex);
Example from_jsonl_line(std::string_view line);

void write_examples(const std::filesystem::path &path, const std::vector<Example> &examples);
std::vector<Example> read_examples(const std::filesystem::path &path);

struct PreprocessConfig {
  SplitSpec split;
  TrivialFilter trivial;
  chem::SmilesOptions smiles;
};

struct PreprocessResult {
  std::vector<Example> train;
  std::vector<Example> valid;
  std::vector<Example> test;
  Vocab vocab;

  int loaded = 0;
  int skipped_lines = 0;
  int extra_products = 0;  // records added by multi-product splitting
  std::map<std::string, int> removed;
  // Over-length records dropped from train / valid; test keeps them.
  int dropped_too_long = 0;
  // Per-class counts of the processed dataset, index 0 is class 1.
  std::array<int, kNumClasses> class_counts {};
};

PreprocessResult preprocess(std::vector<ReactionRecord> records, const PreprocessConfig &cfg);

/// Writes train.jsonl, valid.jsonl, test.jsonl, vocab.json and
/// class_counts.csv into `dir` (created if missing).
void write_preprocessed(const std::filesystem::path &dir, const PreprocessResult &result);

}  // namespace retro::data
