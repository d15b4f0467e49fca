//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/rules/rulebase.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace retro::rules {

Rule &RuleBase::slot(const std::string &text) {
  Rule &rule = rules_[text];
  if (!rule.parsed) {
    rule.text = text;
    rule.parsed = std::make_shared<RetroTemplate>(parse_template(text));
  }
  return rule;
}

void RuleBase::add(const std::string &text, int klass, const std::string &provenance_id) {
  Rule &rule = slot(text);
  ++rule.class_counts[klass];
  ++rule.total_count;
  auto pos = std::lower_bound(rule.provenance_ids.begin(), rule.provenance_ids.end(),
                              provenance_id);
  rule.provenance_ids.insert(pos, provenance_id);
}

void RuleBase::merge(const RuleBase &other) {
  for (const auto &[text, theirs]: other.rules_) {
    Rule &rule = slot(text);
    for (const auto &[k, n]: theirs.class_counts)
      rule.class_counts[k] += n;
    rule.total_count += theirs.total_count;
    std::vector<std::string> ids;
    std::merge(rule.provenance_ids.begin(), rule.provenance_ids.end(),
               theirs.provenance_ids.begin(), theirs.provenance_ids.end(),
               std::back_inserter(ids));
    rule.provenance_ids = std::move(ids);
  }
}

const Rule *RuleBase::find(const std::string &text) const {
  auto it = rules_.find(text);
  return it == rules_.end() ? nullptr : &it->second;
}

std::vector<const Rule *> RuleBase::rules_for_class(int klass) const {
  std::vector<const Rule *> out;
  for (const auto &[text, rule]: rules_) {
    if (rule.count_for(klass) > 0)
      out.push_back(&rule);
  }
  return out;
}

std::string RuleBase::to_jsonl() const {
  std::string out;
  for (const auto &[text, rule]: rules_) {
    nlohmann::ordered_json j;
    j["text"] = text;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto &[k, n]: rule.class_counts)
      counts[std::to_string(k)] = n;
    j["class_counts"] = counts;
    j["total_count"] = rule.total_count;
    j["provenance_ids"] = rule.provenance_ids;
    out += j.dump();
    out += '\n';
  }
  return out;
}

RuleBase RuleBase::from_jsonl(std::string_view text) {
  RuleBase rb;
  std::istringstream in{ std::string(text) };
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Rule &rule = rb.slot(j.at("text").get<std::string>());
      for (const auto &[k, n]: j.at("class_counts").items())
        rule.class_counts[std::stoi(k)] = n.get<int>();
      rule.total_count = j.at("total_count").get<int>();
      rule.provenance_ids = j.at("provenance_ids").get<std::vector<std::string>>();
    } catch (const std::exception &e) {
      throw data::FormatError("rulebase line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rb;
}

void RuleBase::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw data::IoError("cannot write " + path.string());
  out << to_jsonl();
}

RuleBase RuleBase::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw data::IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_jsonl(buf.str());
}

namespace {

struct RecordOutcome {
  std::string text;    // admitted rule, or empty
  std::string reason;  // failure reason when text is empty
  bool extracted = false;
};

RecordOutcome process(const data::ReactionRecord &r) {
  RecordOutcome out;
  try {
    const RetroTemplate t = extract_template(r);
    out.extracted = true;
    if (validate_template(t, r))
      out.text = t.text;
    else
      out.reason = "invalid";
  } catch (const MappingError &e) {
    out.reason = "mapping";
    spdlog::debug("{}: {}", r.id, e.what());
  } catch (const ExtractionError &e) {
    out.reason = "extraction";
    spdlog::debug("{}: {}", r.id, e.what());
  } catch (const std::exception &e) {
    out.reason = "extraction";
    spdlog::debug("{}: {}", r.id, e.what());
  }
  return out;
}

}  // namespace

BuildResult build_rulebase(const std::vector<data::ReactionRecord> &records, int workers) {
  std::vector<RecordOutcome> outcomes(records.size());
  const std::size_t n = records.size();
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      outcomes[i] = process(records[i]);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += threads)
          outcomes[i] = process(records[i]);
      });
    }
    for (auto &th: pool)
      th.join();
  }

  BuildResult result;
  result.stats.records = static_cast<int>(n);
  result.record_rule.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RecordOutcome &o = outcomes[i];
    result.stats.extracted += o.extracted;
    if (o.text.empty()) {
      ++result.stats.failures[o.reason];
      continue;
    }
    ++result.stats.valid;
    result.rulebase.add(o.text, records[i].klass, records[i].id);
    result.record_rule[i] = o.text;
  }
  result.stats.unique = result.rulebase.size();
  return result;
}

}  // namespace retro::rules
