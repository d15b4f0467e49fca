//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "retro/data/reaction.h"
#include "retro/eval/metrics.h"
#include "retro/rules/rulebase.h"

namespace retro::eval {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> read_lines(const fs::path &p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    out.push_back(line);
  return out;
}

/// Random scored records with matches at random ranks (or none).
std::vector<ScoredRecord> random_scored(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ScoredRecord> out(n);
  for (auto &s: out) {
    s.klass = 1 + static_cast<int>(rng() % 10);
    s.first_match = rng() % 3 == 0 ? 0 : 1 + static_cast<int>(rng() % 60);
  }
  return out;
}

TEST_CASE("match") {
  const std::string truth = canonical_set("CC(=O)O.CCO");
  CHECK(match("CCO.CC(=O)O", truth).matched);
  CHECK(match("OC(C)=O.OCC", truth).matched);
  CHECK_FALSE(match("CCO", canonical_set("CCO.N")).matched);
  const MatchResult bad = match("C1CC", truth);
  CHECK_FALSE(bad.matched);
  CHECK(bad.invalid);
  // Multisets: a duplicated component is not the same set.
  CHECK_FALSE(match("CCO.CCO.CC(=O)O", truth).matched);
}

TEST_CASE("accuracy tables") {
  SUBCASE("all correct at rank one") {
    std::vector<ScoredRecord> s(7, ScoredRecord { 3, 1 });
    for (double a: top_n_accuracy(s, { 1, 3, 5, 10, 20, 50 }))
      CHECK(a == 1.0);
    CHECK(max_accuracy(s) == 1.0);
  }
  SUBCASE("identities on random records") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto s = random_scored(200, seed);
      const std::vector<int> ns = { 1, 3, 5, 10, 20, 50 };
      const auto acc = top_n_accuracy(s, ns);
      for (std::size_t k = 1; k < acc.size(); ++k)
        CHECK(acc[k - 1] <= acc[k]);
      CHECK(max_accuracy(s) >= acc.back());

      const auto hist = rank_histogram(s, 10);
      long total = 0;
      for (int c: hist)
        total += c;
      long hits10 = 0;
      for (const auto &r: s)
        hits10 += r.first_match >= 1 && r.first_match <= 10;
      CHECK(total == hits10);
      CHECK(static_cast<double>(total) / static_cast<double>(s.size()) == acc[3]);

      // Count-weighted mean of the class table is the overall accuracy.
      double weighted = 0;
      int count = 0;
      for (const auto &[k, c]: per_class_accuracy(s, 10)) {
        weighted += c.accuracy() * c.count;
        count += c.count;
      }
      CHECK(count == 200);
      CHECK(weighted / count == doctest::Approx(acc[3]).epsilon(1e-12));
    }
  }
  SUBCASE("edge cases") {
    const std::vector<ScoredRecord> misses(5, ScoredRecord { 2, 0 });
    CHECK(max_accuracy(misses) == 0);
    CHECK(rank_histogram(misses, 10) == std::vector<int>(10, 0));
    const std::vector<ScoredRecord> third = { ScoredRecord { 2, 3 } };
    CHECK(rank_histogram(third, 10) == std::vector<int> { 0, 0, 1, 0, 0, 0, 0, 0, 0, 0 });
    CHECK(per_class_accuracy(third).size() == 1);
    CHECK(top_n_accuracy({}, { 1 }) == std::vector<double> { 0.0 });
  }
}

TEST_CASE("scoring records") {
  const std::string truth = canonical_set("CC(=O)O.CCO");
  std::vector<EvalRecord> records = {
    { "a", "CCOC(C)=O", 2, truth, "m", { "CCO.CC(=O)O" } },
    { "b", "CCOC(C)=O", 2, truth, "m", { "C1CC", "CCC", "OCC.OC(C)=O" } },
    { "c", "CCOC(C)=O", 2, truth, "m", {} },
  };
  const auto s = score(records);
  CHECK(s[0].first_match == 1);
  CHECK(s[1].first_match == 3);
  CHECK(s[1].top_invalid);
  CHECK(s[1].invalid == 1);
  CHECK(s[2].empty);
  CHECK(s[2].first_match == 0);

  std::vector<EvalRecord> many;
  for (int i = 0; i < 40; ++i)
    many.push_back(records[i % 3]);
  const auto one = score(many, 1), four = score(many, 4);
  for (std::size_t i = 0; i < many.size(); ++i)
    CHECK(one[i].first_match == four[i].first_match);
}

TEST_CASE("error categories") {
  const auto rb = rules::build_rulebase({ data::parse_reaction(
      "e", 2,
      "[CH3:1][C:2](=[O:3])[OH:4].[OH:5][CH2:6][CH3:7]>>[CH3:1][C:2](=[O:3])[O:5][CH2:6][CH3:7]") }).rulebase;
  REQUIRE(rb.size() == 1);

  // Two ester sites: the literature split is at one, the prediction at the
  // other, and the same class-2 rule produces both.
  const std::string target = "CC(=O)OCCC(C)COC(C)=O";
  const std::string site_a = canonical_set("CC(=O)O.CC(=O)OCC(C)CCO");
  const std::string site_b = canonical_set("CC(=O)O.CC(=O)OCCC(C)CO");
  REQUIRE(site_a != site_b);

  EvalRecord r { "d", target, 2, site_a, "m", { site_b } };
  CHECK(classify_error(r, rb) == ErrorCategory::kPlausibleProxy);
  r.predictions = { site_a };
  CHECK(classify_error(r, rb) == ErrorCategory::kCorrect);
  r.predictions = { "CC(=O)O.C1CC" };
  CHECK(classify_error(r, rb) == ErrorCategory::kInvalid);
  r.predictions = {};
  CHECK(classify_error(r, rb) == ErrorCategory::kInvalid);
  r.predictions = { "CCCCCC" };
  CHECK(classify_error(r, rb) == ErrorCategory::kImplausibleProxy);
  // The rule belongs to class 2 only.
  r.klass = 5;
  r.predictions = { site_b };
  CHECK(classify_error(r, rb) == ErrorCategory::kImplausibleProxy);

  // Exactly one category per record.
  std::vector<EvalRecord> recs(4, EvalRecord { "x", target, 2, site_a, "m", {} });
  recs[0].predictions = { site_a };
  recs[1].predictions = { site_b };
  recs[2].predictions = { "C1CC" };
  recs[3].predictions = { "CCCCCC" };
  const auto rep = build_report("m", recs, &rb);
  int total = 0;
  for (const auto &[name, n]: rep.errors) {
    CHECK(n == 1);
    total += n;
  }
  CHECK(total == 4);
}

TEST_CASE("report files") {
  const std::string truth = canonical_set("CC(=O)O.CCO");
  std::vector<EvalRecord> recs = {
    { "a", "CCOC(C)=O", 1, truth, "baseline", { "CCO.CC(=O)O" } },
    { "b", "CCOC(C)=O", 4, truth, "baseline", { "CCC", "CCO.CC(=O)O" } },
  };
  const auto base = build_report("baseline", recs);
  for (auto &r: recs)
    r.predictions = { "CCO.CC(=O)O" };
  const auto neural = build_report("seq2seq", recs);
  CHECK(base.top_n[0] == 0.5);
  CHECK(neural.top_n[0] == 1.0);

  const fs::path dir = fs::temp_directory_path() / "retro_eval_test";
  fs::create_directories(dir);
  write_topn_csv(dir / "topn.csv", { base, neural });
  write_class_csv(dir / "class.csv", { base, neural });
  write_histogram_csv(dir / "hist.csv", { base, neural });
  write_report_json(dir / "report.json", { base, neural });

  const auto topn = read_lines(dir / "topn.csv");
  REQUIRE(topn.size() == 3);
  CHECK(topn[0] == "model,1,3,5,10,20,50");
  CHECK(topn[1].starts_with("baseline,0.5000,1.0000"));
  CHECK(topn[2].starts_with("seq2seq,1.0000"));

  const auto cls = read_lines(dir / "class.csv");
  CHECK(cls == std::vector<std::string> { "class,count,baseline,seq2seq", "1,1,1.0000,1.0000",
                                          "4,1,1.0000,1.0000" });

  const auto hist = read_lines(dir / "hist.csv");
  REQUIRE(hist.size() == 21);
  CHECK(hist[0] == "rank,count,model");
  CHECK(hist[1] == "1,1,baseline");
  CHECK(hist[2] == "2,1,baseline");
  CHECK(hist[11] == "1,2,seq2seq");
}

TEST_CASE("prediction files") {
  PredictionRecord r { "t1", "CCOC(C)=O", 2, "baseline", {} };
  r.candidates.push_back({ 1, "CC(=O)O.CCO", "[C:1]>>[C:1]", 3, 0, true });
  r.candidates.push_back({ 2, "CCO", "", 0, -1.25, false });
  const PredictionRecord back = prediction_from_jsonl(to_jsonl_line(r));
  CHECK(back.id == "t1");
  CHECK(back.klass == 2);
  REQUIRE(back.candidates.size() == 2);
  CHECK(back.candidates[0].rule == "[C:1]>>[C:1]");
  CHECK(back.candidates[1].log_prob == -1.25);
  CHECK_FALSE(back.candidates[1].complete);
  CHECK(to_jsonl_line(back) == to_jsonl_line(r));

  r.candidates[1].rank = 5;
  CHECK_THROWS_AS(prediction_from_jsonl(to_jsonl_line(r)), data::FormatError);
  CHECK_THROWS_AS(prediction_from_jsonl("{}"), data::FormatError);
}

}  // namespace
}  // namespace retro::eval
