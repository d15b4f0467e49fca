//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace retro::eval {

/// One ranked candidate. Rule-based candidates fill rule/count, neural ones
/// fill log_prob; the other fields keep their defaults.
struct Candidate {
  int rank = 0;
  std::string reactants;
  std::string rule;
  int count = 0;
  double log_prob = 0;
  // False for a neural hypothesis that never emitted EOS.
  bool complete = true;
};

/// Ranked output of one model for one target. Both models write this
/// schema, one JSON object per line.
struct PredictionRecord {
  std::string id;
  std::string target;
  int klass = 0;
  std::string model;
  std::vector<Candidate> candidates;
};

std::string to_jsonl_line(const PredictionRecord &r);
/// Throws data::FormatError; ranks must run 1, 2, ... in order.
PredictionRecord prediction_from_jsonl(std::string_view line);

void write_predictions(const std::filesystem::path &path, const std::vector<PredictionRecord> &records);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path &path);

}  // namespace retro::eval
