//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace retro::data {

inline constexpr int kMaxSequenceLength = 140;

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kBosToken = "<bos>";
inline constexpr std::string_view kEosToken = "<eos>";
inline constexpr std::string_view kUnkToken = "<unk>";

/// "<RX_3>" for class 3.
std::string class_token(int klass);

class TooLong: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using TokenSeq = std::vector<int>;

/// Token string <-> id bijection. Ids 0..3 are <pad>, <bos>, <eos>,
/// <unk>; 4..13 the class tokens; characters follow in byte order.
class Vocab {
public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  /// Specials and class tokens plus the given characters.
  static Vocab from_characters(std::string_view chars);

  int size() const { return static_cast<int>(tokens_.size()); }
  /// <unk> for unknown tokens.
  int id(std::string_view token) const;
  const std::string &token(int id) const { return tokens_.at(id); }
  std::span<const std::string> tokens() const { return tokens_; }

  std::string to_json() const;
  /// Throws std::runtime_error on malformed input.
  static Vocab from_json(std::string_view text);

  void save(const std::filesystem::path &path) const;
  static Vocab load(const std::filesystem::path &path);

  bool operator==(const Vocab &other) const { return tokens_ == other.tokens_; }

private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> ids_;
};

/// Characters of the training source and target strings.
Vocab build_vocab(std::span<const std::string> products,
                  std::span<const std::string> reactants);

/// Class token first, then the product SMILES characters reversed.
/// Throws TooLong when the sequence would exceed kMaxSequenceLength.
TokenSeq tokenize_source(std::string_view product_smiles, int klass, const Vocab &vocab);

/// Reactant SMILES characters followed by <eos>. Throws TooLong.
TokenSeq tokenize_target(std::string_view reactants_smiles, const Vocab &vocab);

/// Inverse of tokenize_target: concatenated characters up to <eos>;
/// special tokens are dropped.
std::string detokenize_target(std::span<const int> tokens, const Vocab &vocab);

/// Inverse of tokenize_source; returns the forward product string.
std::string detokenize_source(std::span<const int> tokens, const Vocab &vocab);

}  // namespace retro::data
