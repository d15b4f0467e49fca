//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/eval/metrics.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "retro/chem/canon.h"
#include "retro/data/reaction.h"
#include "retro/expert/baseline.h"

namespace retro::eval {
namespace {

std::ofstream open_out(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw data::IoError("cannot write " + path.string());
  return out;
}

ScoredRecord score_one(const EvalRecord &r, const chem::SmilesOptions &opts) {
  ScoredRecord s;
  s.klass = r.klass;
  s.empty = r.predictions.empty();
  for (std::size_t k = 0; k < r.predictions.size(); ++k) {
    const MatchResult m = match(r.predictions[k], r.ground_truth, opts);
    s.invalid += m.invalid;
    if (k == 0)
      s.top_invalid = m.invalid;
    if (m.matched && s.first_match == 0)
      s.first_match = static_cast<int>(k) + 1;
  }
  return s;
}

}  // namespace

std::string canonical_set(std::string_view smiles, const chem::SmilesOptions &opts) {
  return chem::join_components(chem::canonical_components(chem::parse_smiles(smiles, opts)));
}

MatchResult match(std::string_view prediction, const std::string &ground_truth,
                  const chem::SmilesOptions &opts) {
  MatchResult m;
  try {
    m.matched = canonical_set(prediction, opts) == ground_truth;
  } catch (const chem::SyntaxError &) {
    m.invalid = true;
  }
  return m;
}

std::vector<ScoredRecord> score(const std::vector<EvalRecord> &records, int workers,
                                const chem::SmilesOptions &opts) {
  std::vector<ScoredRecord> out(records.size());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(records.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < records.size(); ++i)
      out[i] = score_one(records[i], opts);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < records.size(); i += workers)
        out[i] = score_one(records[i], opts);
    });
  }
  for (auto &t: pool)
    t.join();
  return out;
}

std::vector<double> top_n_accuracy(const std::vector<ScoredRecord> &scored, const std::vector<int> &ns) {
  std::vector<double> out;
  for (const int n: ns) {
    long hits = 0;
    for (const auto &s: scored)
      hits += s.first_match > 0 && s.first_match <= n;
    out.push_back(scored.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(scored.size()));
  }
  return out;
}

std::map<int, ClassAccuracy> per_class_accuracy(const std::vector<ScoredRecord> &scored, int n) {
  std::map<int, ClassAccuracy> out;
  for (const auto &s: scored) {
    ClassAccuracy &c = out[s.klass];
    ++c.count;
    c.hits += s.first_match > 0 && s.first_match <= n;
  }
  return out;
}

double max_accuracy(const std::vector<ScoredRecord> &scored) {
  long hits = 0;
  for (const auto &s: scored)
    hits += s.first_match > 0;
  return scored.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(scored.size());
}

std::vector<int> rank_histogram(const std::vector<ScoredRecord> &scored, int max_rank) {
  std::vector<int> counts(max_rank, 0);
  for (const auto &s: scored) {
    if (s.first_match > 0 && s.first_match <= max_rank)
      ++counts[s.first_match - 1];
  }
  return counts;
}

const char *category_name(ErrorCategory c) {
  switch (c) {
  case ErrorCategory::kCorrect:
    return "correct";
  case ErrorCategory::kInvalid:
    return "invalid";
  case ErrorCategory::kPlausibleProxy:
    return "plausible_proxy";
  case ErrorCategory::kImplausibleProxy:
    return "implausible_proxy";
  }
  return "?";
}

ErrorCategory classify_error(const EvalRecord &record, const rules::RuleBase &rulebase,
                             const chem::SmilesOptions &opts) {
  if (record.predictions.empty())
    return ErrorCategory::kInvalid;
  std::string predicted;
  try {
    predicted = canonical_set(record.predictions.front(), opts);
  } catch (const chem::SyntaxError &) {
    return ErrorCategory::kInvalid;
  }
  if (predicted == record.ground_truth)
    return ErrorCategory::kCorrect;

  chem::MolGraph target;
  try {
    target = chem::strip_atom_maps(chem::parse_smiles(record.target, opts));
  } catch (const chem::SyntaxError &) {
    return ErrorCategory::kImplausibleProxy;
  }
  for (const rules::Rule *rule: rulebase.rules_for_class(record.klass)) {
    const auto sets = expert::apply_template(*rule->parsed, target);
    if (std::binary_search(sets.begin(), sets.end(), predicted))
      return ErrorCategory::kPlausibleProxy;
  }
  return ErrorCategory::kImplausibleProxy;
}

MetricsReport build_report(const std::string &model, const std::vector<EvalRecord> &records,
                           const rules::RuleBase *rulebase, int workers, const chem::SmilesOptions &opts) {
  const auto scored = score(records, workers, opts);
  MetricsReport r;
  r.model = model;
  r.records = static_cast<int>(records.size());
  r.ns.assign(kReportedTopN.begin(), kReportedTopN.end());
  r.top_n = top_n_accuracy(scored, r.ns);
  r.per_class = per_class_accuracy(scored, 10);
  r.max_accuracy = max_accuracy(scored);
  r.histogram = rank_histogram(scored, 10);
  if (rulebase) {
    for (const ErrorCategory c: { ErrorCategory::kCorrect, ErrorCategory::kInvalid,
                                  ErrorCategory::kPlausibleProxy, ErrorCategory::kImplausibleProxy })
      r.errors[category_name(c)] = 0;
    for (const auto &rec: records)
      ++r.errors[category_name(classify_error(rec, *rulebase, opts))];
  }
  return r;
}

void write_report_json(const std::filesystem::path &path, const std::vector<MetricsReport> &reports) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto &r: reports) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["records"] = r.records;
    nlohmann::ordered_json top = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < r.ns.size(); ++k)
      top[std::to_string(r.ns[k])] = r.top_n[k];
    j["top_n_accuracy"] = top;
    j["max_accuracy"] = r.max_accuracy;
    nlohmann::ordered_json classes = nlohmann::ordered_json::object();
    for (const auto &[k, c]: r.per_class)
      classes[std::to_string(k)] = { { "count", c.count }, { "hits", c.hits }, { "top10_accuracy", c.accuracy() } };
    j["per_class"] = classes;
    j["rank_histogram"] = r.histogram;
    if (!r.errors.empty()) {
      // Plausible and implausible are rule-support proxies, not judgements.
      j["error_categories"] = r.errors;
    }
    out.push_back(std::move(j));
  }
  open_out(path) << out.dump(1) << "\n";
}

void write_topn_csv(const std::filesystem::path &path, const std::vector<MetricsReport> &reports) {
  auto out = open_out(path);
  out << "model";
  for (const int n: kReportedTopN)
    out << ',' << n;
  out << '\n';
  for (const auto &r: reports) {
    out << r.model;
    for (const double a: r.top_n)
      out << fmt::format(",{:.4f}", a);
    out << '\n';
  }
}

void write_class_csv(const std::filesystem::path &path, const std::vector<MetricsReport> &reports) {
  std::set<int> classes;
  for (const auto &r: reports) {
    for (const auto &[k, c]: r.per_class)
      classes.insert(k);
  }
  auto out = open_out(path);
  out << "class,count";
  for (const auto &r: reports)
    out << ',' << r.model;
  out << '\n';
  for (const int k: classes) {
    int count = 0;
    for (const auto &r: reports) {
      if (auto it = r.per_class.find(k); it != r.per_class.end())
        count = std::max(count, it->second.count);
    }
    out << k << ',' << count;
    for (const auto &r: reports) {
      const auto it = r.per_class.find(k);
      out << fmt::format(",{:.4f}", it == r.per_class.end() ? 0.0 : it->second.accuracy());
    }
    out << '\n';
  }
}

void write_histogram_csv(const std::filesystem::path &path, const std::vector<MetricsReport> &reports) {
  auto out = open_out(path);
  out << "rank,count,model\n";
  for (const auto &r: reports) {
    for (std::size_t k = 0; k < r.histogram.size(); ++k)
      out << k + 1 << ',' << r.histogram[k] << ',' << r.model << '\n';
  }
}

}  // namespace retro::eval
