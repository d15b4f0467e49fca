//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Writes a deterministic atom-mapped toy dataset in the pipeline's TSV layout.
//

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "synthetic.h"

int main(int argc, char **argv) {
  CLI::App cli { "Generate a synthetic reaction dataset" };
  int count = 600;
  std::uint64_t seed = 7;
  std::string out = "data/toy_reactions.tsv";
  cli.add_option("-n,--count", count, "Number of reactions");
  cli.add_option("--seed", seed, "Generator seed");
  cli.add_option("-o,--out", out, "Output path");
  CLI11_PARSE(cli, argc, argv);

  std::ofstream file(out, std::ios::binary);
  if (!file) {
    std::cerr << "cannot write " << out << '\n';
    return 1;
  }
  file << retro::testing::synthetic_tsv(retro::testing::synthetic_reactions(count, seed));
  return 0;
}
