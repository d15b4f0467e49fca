//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "retro/data/reaction.h"
#include "retro/rules/template.h"

namespace retro::rules {

struct Rule {
  std::string text;
  std::map<int, int> class_counts;  // class -> occurrences
  int total_count = 0;
  std::vector<std::string> provenance_ids;
  std::shared_ptr<const RetroTemplate> parsed;

  int count_for(int klass) const {
    auto it = class_counts.find(klass);
    return it == class_counts.end() ? 0 : it->second;
  }
};

/// Validated rules keyed by canonical template text.
class RuleBase {
public:
  void add(const std::string &text, int klass, const std::string &provenance_id);
  /// Associative, commutative union; counts add, provenance lists concatenate
  /// and are kept sorted.
  void merge(const RuleBase &other);

  int size() const { return static_cast<int>(rules_.size()); }
  bool empty() const { return rules_.empty(); }
  const std::map<std::string, Rule> &rules() const { return rules_; }
  const Rule *find(const std::string &text) const;

  /// Rules with a count for `klass`, in text order.
  std::vector<const Rule *> rules_for_class(int klass) const;

  std::string to_jsonl() const;
  static RuleBase from_jsonl(std::string_view text);
  void save(const std::filesystem::path &path) const;
  static RuleBase load(const std::filesystem::path &path);

private:
  Rule &slot(const std::string &text);

  std::map<std::string, Rule> rules_;
};

struct BuildStats {
  int records = 0;
  int extracted = 0;  // templates produced without error
  int valid = 0;      // passed the bidirectional check
  int unique = 0;
  std::map<std::string, int> failures;  // reason -> count

  double coverage() const { return records == 0 ? 0.0 : static_cast<double>(valid) / records; }
};

struct BuildResult {
  RuleBase rulebase;
  BuildStats stats;
  // Per input record: the admitted rule text, empty when none.
  std::vector<std::string> record_rule;
};

/// Extracts and validates every record; `workers` > 1 splits the work across
/// threads without changing the result.
BuildResult build_rulebase(const std::vector<data::ReactionRecord> &records, int workers = 1);

}  // namespace retro::rules
