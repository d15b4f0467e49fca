//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/data/vocab.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "retro/data/reaction.h"

namespace retro::data {

std::string class_token(int klass) {
  return "<RX_" + std::to_string(klass) + ">";
}

void Vocab::add(std::string token) {
  if (ids_.count(token))
    throw std::runtime_error("duplicate vocabulary token " + token);
  ids_.emplace(token, size());
  tokens_.push_back(std::move(token));
}

Vocab Vocab::from_characters(std::string_view chars) {
  Vocab v;
  v.add(std::string(kPadToken));
  v.add(std::string(kBosToken));
  v.add(std::string(kEosToken));
  v.add(std::string(kUnkToken));
  for (int k = 1; k <= kNumClasses; ++k)
    v.add(class_token(k));
  std::set<unsigned char> unique(chars.begin(), chars.end());
  for (const unsigned char c: unique)
    v.add(std::string(1, static_cast<char>(c)));
  return v;
}

int Vocab::id(std::string_view token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::string Vocab::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int i = 0; i < size(); ++i)
    j[tokens_[i]] = i;
  return j.dump(1);
}

Vocab Vocab::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object())
    throw std::runtime_error("vocabulary must be a JSON object");
  std::vector<std::string> by_id(j.size());
  for (const auto &[token, id]: j.items()) {
    const int i = id.get<int>();
    if (i < 0 || i >= static_cast<int>(by_id.size()) || !by_id[i].empty())
      throw std::runtime_error("vocabulary ids must be dense and unique");
    by_id[i] = token;
  }
  Vocab v;
  for (auto &t: by_id)
    v.add(std::move(t));
  if (v.id(kPadToken) != kPad || v.id(kBosToken) != kBos || v.id(kEosToken) != kEos
      || v.token(kUnk) != kUnkToken)
    throw std::runtime_error("vocabulary special tokens are misplaced");
  return v;
}

void Vocab::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << to_json() << '\n';
}

Vocab Vocab::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

Vocab build_vocab(std::span<const std::string> products,
                  std::span<const std::string> reactants) {
  std::string chars;
  for (const auto &s: products)
    chars += s;
  for (const auto &s: reactants)
    chars += s;
  return Vocab::from_characters(chars);
}

TokenSeq tokenize_source(std::string_view product_smiles, int klass, const Vocab &vocab) {
  if (product_smiles.size() + 1 > static_cast<std::size_t>(kMaxSequenceLength))
    throw TooLong("source sequence longer than " + std::to_string(kMaxSequenceLength));
  TokenSeq seq;
  seq.reserve(product_smiles.size() + 1);
  seq.push_back(vocab.id(class_token(klass)));
  for (auto it = product_smiles.rbegin(); it != product_smiles.rend(); ++it)
    seq.push_back(vocab.id(std::string_view(&*it, 1)));
  return seq;
}

TokenSeq tokenize_target(std::string_view reactants_smiles, const Vocab &vocab) {
  if (reactants_smiles.size() + 1 > static_cast<std::size_t>(kMaxSequenceLength))
    throw TooLong("target sequence longer than " + std::to_string(kMaxSequenceLength));
  TokenSeq seq;
  seq.reserve(reactants_smiles.size() + 1);
  for (const char &c: reactants_smiles)
    seq.push_back(vocab.id(std::string_view(&c, 1)));
  seq.push_back(Vocab::kEos);
  return seq;
}

namespace {

bool is_character(const Vocab &vocab, int id) {
  return id > Vocab::kUnk + kNumClasses && id < vocab.size();
}

}  // namespace

std::string detokenize_target(std::span<const int> tokens, const Vocab &vocab) {
  std::string out;
  for (const int t: tokens) {
    if (t == Vocab::kEos)
      break;
    if (is_character(vocab, t))
      out += vocab.token(t);
  }
  return out;
}

std::string detokenize_source(std::span<const int> tokens, const Vocab &vocab) {
  std::string out;
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    if (is_character(vocab, *it))
      out += vocab.token(*it);
  }
  return out;
}

}  // namespace retro::data
