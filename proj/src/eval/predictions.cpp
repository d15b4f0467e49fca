//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/eval/predictions.h"

#include <fstream>

#include <json.hpp>

#include "retro/data/reaction.h"

namespace retro::eval {

std::string to_jsonl_line(const PredictionRecord &r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["target"] = r.target;
  j["class"] = r.klass;
  j["model"] = r.model;
  j["candidates"] = nlohmann::ordered_json::array();
  for (const Candidate &c: r.candidates) {
    nlohmann::ordered_json cj;
    cj["rank"] = c.rank;
    cj["reactants"] = c.reactants;
    cj["rule"] = c.rule;
    cj["count"] = c.count;
    cj["log_prob"] = c.log_prob;
    cj["complete"] = c.complete;
    j["candidates"].push_back(std::move(cj));
  }
  return j.dump();
}

PredictionRecord prediction_from_jsonl(std::string_view line) {
  PredictionRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.id = j.at("id").get<std::string>();
    r.target = j.at("target").get<std::string>();
    r.klass = j.at("class").get<int>();
    r.model = j.at("model").get<std::string>();
    for (const auto &cj: j.at("candidates")) {
      Candidate c;
      c.rank = cj.at("rank").get<int>();
      c.reactants = cj.at("reactants").get<std::string>();
      c.rule = cj.value("rule", std::string());
      c.count = cj.value("count", 0);
      c.log_prob = cj.value("log_prob", 0.0);
      c.complete = cj.value("complete", true);
      r.candidates.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception &e) {
    throw data::FormatError(std::string("bad prediction line: ") + e.what());
  }
  for (std::size_t k = 0; k < r.candidates.size(); ++k) {
    if (r.candidates[k].rank != static_cast<int>(k) + 1)
      throw data::FormatError("prediction ranks of " + r.id + " are not 1, 2, ...");
  }
  return r;
}

void write_predictions(const std::filesystem::path &path, const std::vector<PredictionRecord> &records) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw data::IoError("cannot write " + path.string());
  for (const auto &r: records)
    out << to_jsonl_line(r) << '\n';
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw data::IoError("cannot open " + path.string());
  std::vector<PredictionRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty())
      out.push_back(prediction_from_jsonl(line));
  }
  return out;
}

}  // namespace retro::eval
