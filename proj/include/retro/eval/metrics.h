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

#include "retro/chem/smiles.h"
#include "retro/eval/predictions.h"
#include "retro/rules/rulebase.h"

namespace retro::eval {

inline constexpr std::array<int, 6> kReportedTopN = { 1, 3, 5, 10, 20, 50 };

struct MatchResult {
  bool matched = false;
  // The prediction failed to parse.
  bool invalid = false;
};

/// Canonical '.'-joined component multiset of `smiles`; throws
/// chem::SyntaxError.
std::string canonical_set(std::string_view smiles, const chem::SmilesOptions &opts = {});

/// Order-independent comparison of a predicted reactant set against the
/// canonical ground truth.
MatchResult match(std::string_view prediction, const std::string &ground_truth,
                  const chem::SmilesOptions &opts = {});

/// A target with its ground truth and one model's ranked predictions.
struct EvalRecord {
  std::string id;
  std::string target;
  int klass = 0;
  std::string ground_truth;  // canonical
  std::string model;
  std::vector<std::string> predictions;  // rank order
};

/// Per-record result of matching every prediction.
struct ScoredRecord {
  int klass = 0;
  // Rank of the first matching prediction, 0 when none matches.
  int first_match = 0;
  // Number of predictions that failed to parse.
  int invalid = 0;
  bool top_invalid = false;
  bool empty = false;
};

/// Scores records on `workers` threads; the output order follows the input.
std::vector<ScoredRecord> score(const std::vector<EvalRecord> &records, int workers = 1,
                                const chem::SmilesOptions &opts = {});

/// Fraction of records matched at rank <= N, per N.
std::vector<double> top_n_accuracy(const std::vector<ScoredRecord> &scored, const std::vector<int> &ns);

struct ClassAccuracy {
  int count = 0;
  int hits = 0;
  double accuracy() const { return count == 0 ? 0.0 : static_cast<double>(hits) / count; }
};

std::map<int, ClassAccuracy> per_class_accuracy(const std::vector<ScoredRecord> &scored, int n = 10);

/// Fraction matched at any rank.
double max_accuracy(const std::vector<ScoredRecord> &scored);

/// counts[r-1] = records whose best matching rank is r, for r <= max_rank.
std::vector<int> rank_histogram(const std::vector<ScoredRecord> &scored, int max_rank = 10);

enum class ErrorCategory { kCorrect, kInvalid, kPlausibleProxy, kImplausibleProxy };

const char *category_name(ErrorCategory c);

/**
 * Category of a record's top prediction. Plausible versus implausible is an
 * automatic stand-in for chemical judgement: the prediction counts as
 * plausible when some rule of the record's class, applied to the target,
 * produces exactly that set. A record without predictions counts as invalid.
 */
ErrorCategory classify_error(const EvalRecord &record, const rules::RuleBase &rulebase,
                             const chem::SmilesOptions &opts = {});

struct MetricsReport {
  std::string model;
  int records = 0;
  std::vector<int> ns;
  std::vector<double> top_n;
  std::map<int, ClassAccuracy> per_class;  // top-10
  double max_accuracy = 0;
  std::vector<int> histogram;  // ranks 1..10
  std::map<std::string, int> errors;  // category name -> count; empty if not run
};

/// All metrics for one model. The error breakdown runs only when
/// `rulebase` is given.
MetricsReport build_report(const std::string &model, const std::vector<EvalRecord> &records,
                           const rules::RuleBase *rulebase = nullptr, int workers = 1,
                           const chem::SmilesOptions &opts = {});

void write_report_json(const std::filesystem::path &path, const std::vector<MetricsReport> &reports);
/// model,1,3,5,10,20,50 with one row per report.
void write_topn_csv(const std::filesystem::path &path, const std::vector<MetricsReport> &reports);
/// class,count,<model>... with top-10 accuracy per model.
void write_class_csv(const std::filesystem::path &path, const std::vector<MetricsReport> &reports);
/// rank,count,model with ten rows per model.
void write_histogram_csv(const std::filesystem::path &path, const std::vector<MetricsReport> &reports);

}  // namespace retro::eval
