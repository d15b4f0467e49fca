//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/app/commands.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "retro/chem/canon.h"
#include "retro/chem/smiles.h"
#include "retro/expert/baseline.h"
#include "retro/nn/checkpoint.h"
#include "retro/nn/decode.h"

namespace retro::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char *kModelDir = "model";

void require_file(const fs::path &p) {
  if (!fs::exists(p))
    throw data::IoError("missing " + p.string() + " (run the earlier stages first)");
}

/// Runs body(i) for i in [0, n) on `workers` threads with a fixed stride.
template<class F>
void parallel_for(std::size_t n, int workers, F body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers)
        body(i);
    });
  }
  for (auto &t: pool)
    t.join();
}

std::vector<nn::SeqPair> to_pairs(const std::vector<data::Example> &examples, const data::Vocab &vocab) {
  std::vector<nn::SeqPair> out;
  for (const auto &ex: examples) {
    if (!ex.too_long())
      out.push_back({ data::source_ids(ex, vocab), data::target_ids(ex, vocab) });
  }
  return out;
}

void write_json(const fs::path &path, const nlohmann::ordered_json &j) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw data::IoError("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

}  // namespace

void RunConfig::set_seed(std::uint64_t seed) {
  split.seed = seed;
  model.rng_seed = seed;
}

void RunConfig::validate() const {
  try {
    split.validate();
  } catch (const std::invalid_argument &e) {
    throw nn::ConfigError(e.what());
  }
  nn::Seq2SeqConfig probe = model;
  probe.vocab_size = std::max(probe.vocab_size, 1);
  probe.validate();
  if (beam_width <= 0)
    throw nn::ConfigError("beam_width must be positive");
  if (!eval_ns.empty() && beam_width < *std::max_element(eval_ns.begin(), eval_ns.end()))
    throw nn::ConfigError(fmt::format("beam_width {} is below the largest evaluated N", beam_width));
  if (max_steps <= 0 || eval_interval <= 0 || patience <= 0)
    throw nn::ConfigError("max_steps, eval_interval and patience must be positive");
  if (workers <= 0)
    throw nn::ConfigError("workers must be positive");
  if (model_kind != "seq2seq" && model_kind != "baseline")
    throw nn::ConfigError("model must be seq2seq or baseline, got " + model_kind);
  if (klass && (*klass < 1 || *klass > data::kNumClasses))
    throw nn::ConfigError("class must lie in 1..10");
}

RunConfig load_run_config(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw data::IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw nn::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  static const std::set<std::string> known = { "split", "model", "train", "beam_width", "eval_ns",
                                               "strict_valence", "workers" };
  RunConfig cfg;
  try {
    for (const auto &[key, value]: j.items()) {
      if (!known.count(key))
        throw nn::ConfigError("unknown config key " + key);
    }
    if (j.contains("split")) {
      const auto &s = j["split"];
      if (s.contains("ratios"))
        cfg.split.ratios = s["ratios"].get<std::array<double, 3>>();
      cfg.split.seed = s.value("seed", cfg.split.seed);
      cfg.split.stratify = s.value("stratify", cfg.split.stratify);
    }
    if (j.contains("model"))
      cfg.model = nn::config_from_json(j["model"], cfg.model);
    if (j.contains("train")) {
      const auto &t = j["train"];
      cfg.max_steps = t.value("max_steps", cfg.max_steps);
      cfg.eval_interval = t.value("eval_interval", cfg.eval_interval);
      cfg.patience = t.value("patience", cfg.patience);
    }
    cfg.beam_width = j.value("beam_width", cfg.beam_width);
    if (j.contains("eval_ns"))
      cfg.eval_ns = j["eval_ns"].get<std::vector<int>>();
    cfg.strict_valence = j.value("strict_valence", cfg.strict_valence);
    cfg.workers = j.value("workers", cfg.workers);
  } catch (const json::exception &e) {
    throw nn::ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

std::string class_count_table(const data::PreprocessResult &r) {
  int total = 0;
  for (const int c: r.class_counts)
    total += c;
  std::string out = fmt::format("{:>5}  {:>8}  {:>6}\n", "class", "count", "share");
  for (int k = 0; k < data::kNumClasses; ++k) {
    const double share = total == 0 ? 0.0 : 100.0 * r.class_counts[k] / total;
    out += fmt::format("{:>5}  {:>8}  {:>5.1f}%\n", k + 1, r.class_counts[k], share);
  }
  out += fmt::format("{:>5}  {:>8}\n", "total", total);
  return out;
}

data::PreprocessResult cmd_preprocess(const RunConfig &cfg) {
  const auto loaded = data::load_reactions(cfg.dataset, cfg.smiles());
  data::PreprocessConfig pc;
  pc.split = cfg.split;
  pc.smiles = cfg.smiles();
  auto result = data::preprocess(loaded.records, pc);
  result.skipped_lines = loaded.skipped;
  fs::create_directories(cfg.out);
  data::write_preprocessed(cfg.out, result);
  spdlog::info("preprocess: {} records loaded, {} lines skipped, train/valid/test = {}/{}/{}",
               result.loaded, result.skipped_lines, result.train.size(), result.valid.size(),
               result.test.size());
  return result;
}

RuleReport cmd_extract_rules(const RunConfig &cfg) {
  const fs::path train_path = cfg.out / "train.jsonl";
  require_file(train_path);
  RuleReport report;
  std::vector<data::ReactionRecord> records;
  for (const auto &ex: data::read_examples(train_path)) {
    try {
      records.push_back(data::parse_reaction(ex.id, ex.klass, ex.mapped_reaction, cfg.smiles()));
    } catch (const std::exception &e) {
      ++report.unparsable;
      spdlog::debug("extract-rules: skipping {}: {}", ex.id, e.what());
    }
  }
  auto built = rules::build_rulebase(records, cfg.workers);
  report.stats = built.stats;
  built.rulebase.save(cfg.out / "rules.jsonl");

  nlohmann::ordered_json j;
  j["records"] = report.stats.records;
  j["unparsable"] = report.unparsable;
  j["extracted"] = report.stats.extracted;
  j["valid"] = report.stats.valid;
  j["unique"] = report.stats.unique;
  j["coverage"] = report.stats.coverage();
  j["failures"] = report.stats.failures;
  write_json(cfg.out / "rule_stats.json", j);
  spdlog::info("extract-rules: {} valid rules, {} unique, coverage {:.1f}%", report.stats.valid,
               report.stats.unique, 100 * report.stats.coverage());
  return report;
}

nn::FitResult cmd_train(const RunConfig &cfg) {
  for (const char *name: { "vocab.json", "train.jsonl", "valid.jsonl" })
    require_file(cfg.out / name);
  const data::Vocab vocab = data::Vocab::load(cfg.out / "vocab.json");
  nn::Seq2SeqConfig mc = cfg.model;
  mc.vocab_size = vocab.size();
  mc.validate();
  const auto train = to_pairs(data::read_examples(cfg.out / "train.jsonl"), vocab);
  const auto valid = to_pairs(data::read_examples(cfg.out / "valid.jsonl"), vocab);
  if (train.empty())
    throw data::FormatError("train split is empty");

  nn::Seq2Seq<float> model(mc);
  auto opt = nn::OptimizerState<float>::zeros_like(model);
  nn::FitOptions options;
  options.max_steps = cfg.max_steps;
  options.eval_interval = cfg.eval_interval;
  options.patience = cfg.patience;
  options.on_step = [](long step, const nn::StepStats &s) {
    if (step % 100 == 0)
      spdlog::info("train: step {} loss {:.4f} grad norm {:.3f}", step, s.loss, s.grad_norm);
  };
  const nn::FitResult result = nn::fit(model, opt, train, valid, options);
  nn::save_checkpoint(model, opt, cfg.out / kModelDir);
  nn::write_training_log(cfg.out / "train_log.csv", result.log);
  spdlog::info("train: {} steps, best validation perplexity {:.4f} at step {}", result.steps,
               result.best_perplexity, result.best_step);
  return result;
}

std::vector<eval::PredictionRecord> cmd_predict(const RunConfig &cfg) {
  struct Job {
    std::string id, target;
    int klass;
  };
  std::vector<Job> jobs;
  if (cfg.target) {
    if (!cfg.klass)
      throw nn::ConfigError("--target needs --class");
    const std::string canon = chem::canonical_smiles(chem::parse_smiles(*cfg.target, cfg.smiles()));
    jobs.push_back({ "input", canon, *cfg.klass });
  } else {
    require_file(cfg.out / "test.jsonl");
    for (const auto &ex: data::read_examples(cfg.out / "test.jsonl")) {
      if (!cfg.klass || ex.klass == *cfg.klass)
        jobs.push_back({ ex.id, ex.product_smiles, ex.klass });
    }
  }

  std::vector<eval::PredictionRecord> out(jobs.size());
  if (cfg.model_kind == "baseline") {
    require_file(cfg.out / "rules.jsonl");
    const rules::RuleBase rb = rules::RuleBase::load(cfg.out / "rules.jsonl");
    parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
      const Job &job = jobs[i];
      eval::PredictionRecord &r = out[i];
      r = { job.id, job.target, job.klass, "baseline", {} };
      const auto target = chem::parse_smiles(job.target, cfg.smiles());
      for (const auto &c: expert::predict_baseline(rb, target, job.klass, cfg.beam_width))
        r.candidates.push_back({ c.rank, c.reactants, c.rule, c.count, 0.0, true });
    });
  } else {
    require_file(cfg.out / "vocab.json");
    const data::Vocab vocab = data::Vocab::load(cfg.out / "vocab.json");
    const nn::Checkpoint ck = nn::load_checkpoint(cfg.out / kModelDir);
    if (ck.model.config().vocab_size != vocab.size())
      throw nn::ShapeMismatch("checkpoint vocabulary differs from vocab.json");
    parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
      const Job &job = jobs[i];
      eval::PredictionRecord &r = out[i];
      r = { job.id, job.target, job.klass, "seq2seq", {} };
      data::TokenSeq src;
      try {
        src = data::tokenize_source(job.target, job.klass, vocab);
      } catch (const data::TooLong &) {
        return;  // no candidates; scored as a miss
      }
      const auto hyps = nn::beam_decode(ck.model, src, cfg.beam_width);
      for (std::size_t k = 0; k < hyps.size(); ++k) {
        r.candidates.push_back({ static_cast<int>(k) + 1, data::detokenize_target(hyps[k].tokens, vocab),
                                 "", 0, hyps[k].log_prob, hyps[k].complete });
      }
    });
  }
  if (!cfg.target) {
    eval::write_predictions(cfg.out / ("predictions_" + cfg.model_kind + ".jsonl"), out);
    spdlog::info("predict: {} targets written for {}", out.size(), cfg.model_kind);
  }
  return out;
}

std::vector<eval::MetricsReport> cmd_evaluate(const RunConfig &cfg) {
  require_file(cfg.out / "test.jsonl");
  std::map<std::string, data::Example> truth;
  for (auto &ex: data::read_examples(cfg.out / "test.jsonl"))
    truth.emplace(ex.id, std::move(ex));

  std::optional<rules::RuleBase> rb;
  if (fs::exists(cfg.out / "rules.jsonl"))
    rb = rules::RuleBase::load(cfg.out / "rules.jsonl");

  std::vector<eval::MetricsReport> reports;
  for (const char *kind: { "baseline", "seq2seq" }) {
    const fs::path path = cfg.out / (std::string("predictions_") + kind + ".jsonl");
    if (!fs::exists(path))
      continue;
    std::vector<eval::EvalRecord> records;
    for (const auto &p: eval::read_predictions(path)) {
      if (cfg.klass && p.klass != *cfg.klass)
        continue;
      const auto it = truth.find(p.id);
      if (it == truth.end())
        throw data::FormatError("prediction " + p.id + " has no ground truth in test.jsonl");
      eval::EvalRecord r { p.id, p.target, p.klass,
                           eval::canonical_set(it->second.reactants_smiles, cfg.smiles()), kind, {} };
      for (const auto &c: p.candidates)
        r.predictions.push_back(c.reactants);
      records.push_back(std::move(r));
    }
    reports.push_back(eval::build_report(kind, records, rb ? &*rb : nullptr, cfg.workers, cfg.smiles()));
  }
  if (reports.empty())
    throw data::IoError("no predictions_*.jsonl in " + cfg.out.string());
  eval::write_report_json(cfg.out / "report.json", reports);
  eval::write_topn_csv(cfg.out / "topn_accuracy.csv", reports);
  eval::write_class_csv(cfg.out / "class_accuracy.csv", reports);
  eval::write_histogram_csv(cfg.out / "rank_histogram.csv", reports);
  for (const auto &r: reports)
    spdlog::info("evaluate: {} top-1 {:.3f} top-10 {:.3f} max {:.3f} over {} targets", r.model, r.top_n[0],
                 r.top_n.size() > 3 ? r.top_n[3] : 0.0, r.max_accuracy, r.records);
  return reports;
}

}  // namespace retro::app
