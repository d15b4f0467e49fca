//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/data/reaction.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "retro/chem/canon.h"

namespace retro::data {
namespace {

std::vector<chem::MolGraph> split_components(const chem::MolGraph &mol) {
  std::vector<chem::MolGraph> out;
  for (const auto &atoms: mol.components())
    out.push_back(mol.subgraph(atoms));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\n'))
    s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  return s;
}

}  // namespace

ReactionRecord parse_reaction(std::string id, int klass, std::string_view reaction_smiles,
                              const chem::SmilesOptions &opts) {
  if (klass < 1 || klass > kNumClasses)
    throw FormatError("reaction class out of range: " + std::to_string(klass));

  const auto first = reaction_smiles.find('>');
  const auto second = first == std::string_view::npos
                          ? std::string_view::npos
                          : reaction_smiles.find('>', first + 1);
  if (second == std::string_view::npos
      || reaction_smiles.find('>', second + 1) != std::string_view::npos)
    throw FormatError("reaction SMILES must have the form reactants>reagents>products");

  const std::string_view lhs = reaction_smiles.substr(0, first);
  const std::string_view rhs = reaction_smiles.substr(second + 1);
  if (lhs.empty() || rhs.empty())
    throw FormatError("reaction without reactants or products");

  ReactionRecord r;
  r.id = std::move(id);
  r.klass = klass;
  r.raw_text = std::string(reaction_smiles);
  r.reactants = split_components(chem::parse_smiles(lhs, opts));
  r.product = chem::parse_smiles(rhs, opts);
  return r;
}

LoadResult load_reactions_from_string(std::string_view contents,
                                      const chem::SmilesOptions &opts) {
  LoadResult result;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string_view::npos)
      end = contents.size();
    const std::string_view line = trim(contents.substr(start, end - start));
    start = end + 1;
    ++line_no;

    if (line.empty())
      continue;
    if (line_no == 1 && line.substr(0, 3) == "id\t")
      continue;

    try {
      const auto tab1 = line.find('\t');
      const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
      if (tab2 == std::string_view::npos)
        throw FormatError("expected three tab-separated columns");
      const std::string_view id = line.substr(0, tab1);
      const std::string_view klass_text = line.substr(tab1 + 1, tab2 - tab1 - 1);
      const std::string_view rxn = trim(line.substr(tab2 + 1));

      int klass = 0;
      auto [ptr, ec] = std::from_chars(klass_text.data(), klass_text.data() + klass_text.size(),
                                       klass);
      if (ec != std::errc() || ptr != klass_text.data() + klass_text.size())
        throw FormatError("reaction class is not an integer");
      result.records.push_back(parse_reaction(std::string(id), klass, rxn, opts));
    } catch (const std::exception &e) {
      ++result.skipped;
      spdlog::warn("line {}: {}", line_no, e.what());
    }
  }
  return result;
}

LoadResult load_reactions(const std::filesystem::path &path, const chem::SmilesOptions &opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_reactions_from_string(buf.str(), opts);
}

std::vector<ReactionRecord> split_multiproduct(const ReactionRecord &r) {
  const auto comps = r.product.components();
  if (comps.size() <= 1)
    return { r };
  std::vector<ReactionRecord> out;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    ReactionRecord single = r;
    single.id = r.id + "_p" + std::to_string(k + 1);
    single.product = r.product.subgraph(comps[k]);
    out.push_back(std::move(single));
  }
  return out;
}

std::string trivial_reason(const chem::MolGraph &product, const TrivialFilter &cfg) {
  const std::string can = chem::canonical_smiles(product);
  if (std::find(cfg.never_trivial.begin(), cfg.never_trivial.end(), can)
      != cfg.never_trivial.end())
    return {};
  if (std::find(cfg.always_trivial.begin(), cfg.always_trivial.end(), can)
      != cfg.always_trivial.end())
    return "listed";

  const bool has_carbon = std::any_of(product.atoms().begin(), product.atoms().end(),
                                      [](const chem::Atom &a) { return a.element == 6; });
  if (!has_carbon)
    return "no_carbon";
  if (product.num_atoms() <= cfg.max_trivial_heavy_atoms)
    return "small";
  return {};
}

FilterResult filter_trivial(std::vector<ReactionRecord> records, const TrivialFilter &cfg) {
  FilterResult result;
  for (auto &r: records) {
    const std::string reason = trivial_reason(r.product, cfg);
    if (reason.empty())
      result.kept.push_back(std::move(r));
    else
      ++result.removed[reason];
  }
  return result;
}

std::string product_smiles(const ReactionRecord &r) {
  return chem::canonical_smiles(r.product);
}

std::string reactants_smiles(const ReactionRecord &r) {
  std::vector<std::string> parts;
  for (const auto &m: r.reactants)
    parts.push_back(chem::canonical_smiles(m));
  return chem::join_components(std::move(parts));
}

std::string mapped_reaction_smiles(const ReactionRecord &r) {
  std::string out;
  for (std::size_t i = 0; i < r.reactants.size(); ++i) {
    if (i > 0)
      out += '.';
    out += chem::write_smiles(r.reactants[i]);
  }
  out += ">>";
  out += chem::write_smiles(r.product);
  return out;
}

}  // namespace retro::data
