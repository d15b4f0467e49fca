//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/data/pipeline.h"

#include <fstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace retro::data {

Example make_example(const ReactionRecord &r) {
  Example ex;
  ex.id = r.id;
  ex.klass = r.klass;
  ex.product_smiles = product_smiles(r);
  ex.reactants_smiles = reactants_smiles(r);
  ex.mapped_reaction = mapped_reaction_smiles(r);

  const auto limit = static_cast<std::size_t>(kMaxSequenceLength);
  if (ex.product_smiles.size() + 1 > limit || ex.reactants_smiles.size() + 1 > limit)
    return ex;
  ex.src_tokens.push_back(class_token(r.klass));
  for (auto it = ex.product_smiles.rbegin(); it != ex.product_smiles.rend(); ++it)
    ex.src_tokens.emplace_back(1, *it);
  for (const char c: ex.reactants_smiles)
    ex.tgt_tokens.emplace_back(1, c);
  ex.tgt_tokens.emplace_back(kEosToken);
  return ex;
}

TokenSeq token_ids(const std::vector<std::string> &tokens, const Vocab &vocab) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const auto &t: tokens)
    out.push_back(vocab.id(t));
  return out;
}

TokenSeq source_ids(const Example &ex, const Vocab &vocab) {
  return tokenize_source(ex.product_smiles, ex.klass, vocab);
}

TokenSeq target_ids(const Example &ex, const Vocab &vocab) {
  return tokenize_target(ex.reactants_smiles, vocab);
}

std::string to_jsonl_line(const Example &ex) {
  nlohmann::ordered_json j;
  j["id"] = ex.id;
  j["class"] = ex.klass;
  j["src_tokens"] = ex.src_tokens;
  j["tgt_tokens"] = ex.tgt_tokens;
  j["product_smiles"] = ex.product_smiles;
  j["reactants_smiles"] = ex.reactants_smiles;
  j["mapped_reaction"] = ex.mapped_reaction;
  return j.dump();
}

Example from_jsonl_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Example ex;
    ex.id = j.at("id").get<std::string>();
    ex.klass = j.at("class").get<int>();
    ex.src_tokens = j.at("src_tokens").get<std::vector<std::string>>();
    ex.tgt_tokens = j.at("tgt_tokens").get<std::vector<std::string>>();
    ex.product_smiles = j.at("product_smiles").get<std::string>();
    ex.reactants_smiles = j.at("reactants_smiles").get<std::string>();
    ex.mapped_reaction = j.value("mapped_reaction", std::string());
    return ex;
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("bad example line: ") + e.what());
  }
}

void write_examples(const std::filesystem::path &path, const std::vector<Example> &examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  for (const auto &ex: examples)
    out << to_jsonl_line(ex) << '\n';
}

std::vector<Example> read_examples(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::vector<Example> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty())
      out.push_back(from_jsonl_line(line));
  }
  return out;
}

PreprocessResult preprocess(std::vector<ReactionRecord> records, const PreprocessConfig &cfg) {
  PreprocessResult res;
  res.loaded = static_cast<int>(records.size());

  std::vector<ReactionRecord> single;
  for (const auto &r: records) {
    auto parts = split_multiproduct(r);
    res.extra_products += static_cast<int>(parts.size()) - 1;
    for (auto &p: parts)
      single.push_back(std::move(p));
  }
  records.clear();

  FilterResult filtered = filter_trivial(std::move(single), cfg.trivial);
  res.removed = filtered.removed;

  std::vector<Example> all;
  std::vector<int> classes;
  all.reserve(filtered.kept.size());
  for (const auto &r: filtered.kept) {
    all.push_back(make_example(r));
    classes.push_back(r.klass);
    ++res.class_counts[r.klass - 1];
  }

  const SplitIndices idx = split_dataset(all.size(), cfg.split, classes);
  auto take = [&](const std::vector<std::size_t> &which, std::vector<Example> &into, bool drop_long) {
    for (const std::size_t i: which) {
      if (drop_long && all[i].too_long()) {
        ++res.dropped_too_long;
        continue;
      }
      into.push_back(all[i]);
    }
  };
  take(idx.train, res.train, true);
  take(idx.valid, res.valid, true);
  take(idx.test, res.test, false);
  if (res.dropped_too_long > 0)
    spdlog::info("dropped {} over-length records from train/valid", res.dropped_too_long);

  std::vector<std::string> products;
  std::vector<std::string> reactants;
  for (const auto &ex: res.train) {
    products.push_back(ex.product_smiles);
    reactants.push_back(ex.reactants_smiles);
  }
  res.vocab = build_vocab(products, reactants);
  return res;
}

void write_preprocessed(const std::filesystem::path &dir, const PreprocessResult &result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_examples(dir / "train.jsonl", result.train);
  write_examples(dir / "valid.jsonl", result.valid);
  write_examples(dir / "test.jsonl", result.test);
  result.vocab.save(dir / "vocab.json");

  std::ofstream out(dir / "class_counts.csv", std::ios::binary);
  if (!out)
    throw IoError("cannot write class_counts.csv");
  out << "class,count\n";
  int total = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    out << (k + 1) << ',' << result.class_counts[k] << '\n';
    total += result.class_counts[k];
  }
  out << "total," << total << '\n';
}

}  // namespace retro::data
