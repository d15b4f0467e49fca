//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Pipeline driver: preprocess -> extract-rules / train -> predict -> evaluate.
//

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "retro/app/commands.h"
#include "retro/nn/checkpoint.h"

namespace {

using namespace retro;

struct Overrides {
  std::string config;
  std::string dataset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> beam_width;
  std::optional<int> klass;
  std::string model;
  std::optional<int> workers;
  bool strict_valence = false;
  std::string target;
  bool verbose = false;
};

app::RunConfig resolve(const Overrides &o) {
  app::RunConfig cfg = o.config.empty() ? app::RunConfig {} : app::load_run_config(o.config);
  if (!o.dataset.empty())
    cfg.dataset = o.dataset;
  if (!o.out.empty())
    cfg.out = o.out;
  if (o.seed)
    cfg.set_seed(*o.seed);
  if (o.beam_width)
    cfg.beam_width = *o.beam_width;
  if (o.klass)
    cfg.klass = *o.klass;
  if (!o.model.empty())
    cfg.model_kind = o.model;
  if (o.workers)
    cfg.workers = *o.workers;
  if (o.strict_valence)
    cfg.strict_valence = true;
  if (!o.target.empty())
    cfg.target = o.target;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App cli { "Template-free retrosynthesis pipeline" };
  cli.require_subcommand(1);
  Overrides o;
  cli.add_option("--config", o.config, "JSON run config");
  cli.add_option("--dataset", o.dataset, "Tab-separated reaction file (id, class, reaction SMILES)");
  cli.add_option("--out", o.out, "Run directory shared by all stages");
  cli.add_option("--seed", o.seed, "Seed for the split and the model");
  cli.add_option("--workers", o.workers, "Worker threads");
  cli.add_flag("--strict-valence", o.strict_valence, "Reject over-valent atoms instead of warning");
  cli.add_flag("-v,--verbose", o.verbose, "Debug logging");

  auto *pre = cli.add_subcommand("preprocess", "Split, filter and tokenize the dataset");
  auto *ext = cli.add_subcommand("extract-rules", "Build the rulebase from the training split");
  auto *train = cli.add_subcommand("train", "Train the sequence model");
  auto *predict = cli.add_subcommand("predict", "Rank reactant sets for the test split or one target");
  predict->add_option("--model", o.model, "seq2seq or baseline")->check(CLI::IsMember({ "seq2seq", "baseline" }));
  predict->add_option("--beam-width", o.beam_width, "Beam width / candidates kept");
  predict->add_option("--class", o.klass, "Reaction class (1-10)");
  predict->add_option("--target", o.target, "Single product SMILES (needs --class)");
  auto *evaluate = cli.add_subcommand("evaluate", "Score predictions against the test split");
  evaluate->add_option("--class", o.klass, "Restrict to one reaction class");

  CLI11_PARSE(cli, argc, argv);
  spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    const app::RunConfig cfg = resolve(o);
    if (pre->parsed()) {
      std::cout << app::class_count_table(app::cmd_preprocess(cfg));
    } else if (ext->parsed()) {
      const auto r = app::cmd_extract_rules(cfg);
      std::cout << fmt::format("valid {} unique {} coverage {:.1f}%\n", r.stats.valid, r.stats.unique,
                               100 * r.stats.coverage());
    } else if (train->parsed()) {
      app::cmd_train(cfg);
    } else if (predict->parsed()) {
      const auto preds = app::cmd_predict(cfg);
      if (cfg.target) {
        for (const auto &c: preds.front().candidates)
          std::cout << c.rank << '\t' << c.reactants << '\n';
      }
    } else if (evaluate->parsed()) {
      for (const auto &r: app::cmd_evaluate(cfg)) {
        std::cout << r.model;
        for (std::size_t k = 0; k < r.ns.size(); ++k)
          std::cout << fmt::format("  top-{} {:.1f}%", r.ns[k], 100 * r.top_n[k]);
        std::cout << '\n';
      }
    }
  } catch (const nn::ConfigError &e) {
    spdlog::error("config error: {}", e.what());
    return 2;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
