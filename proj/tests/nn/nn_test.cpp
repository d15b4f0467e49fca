//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "nn_checks.h"
#include "retro/data/reaction.h"
#include "retro/nn/checkpoint.h"
#include "retro/nn/decode.h"
#include "retro/nn/train.h"

namespace retro::nn {
namespace {

using data::Vocab;
namespace fs = std::filesystem;

Seq2SeqConfig small_config(std::uint64_t seed = 7) {
  Seq2SeqConfig cfg;
  cfg.vocab_size = 16;
  cfg.embedding_dim = 8;
  cfg.hidden_dim = 8;
  cfg.attention_dim = 8;
  cfg.encoder_layers = 2;
  cfg.decoder_layers = 2;
  cfg.max_seq_len = 12;
  cfg.max_decode_len = 12;
  cfg.batch_size = 4;
  cfg.rng_seed = seed;
  return cfg;
}

bool same_weights(const Seq2Seq<float> &a, const Seq2Seq<float> &b) {
  for (std::size_t k = 0; k < a.tensors().size(); ++k) {
    if (a.tensors()[k].value != b.tensors()[k].value)
      return false;
  }
  return true;
}

fs::path scratch_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("retro_nn_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST_CASE("config defaults and validation") {
  Seq2SeqConfig cfg;
  CHECK(cfg.embedding_dim == 512);
  CHECK(cfg.encoder_layers == 2);
  CHECK(cfg.decoder_layers == 4);
  CHECK(cfg.attention_dim == 512);
  CHECK(cfg.dropout_keep == 0.8);
  CHECK(cfg.max_seq_len == 140);
  CHECK(cfg.max_decode_len == 140);
  CHECK(cfg.batch_size == 32);
  CHECK(cfg.learning_rate == 1e-4);
  CHECK(cfg.max_grad_norm == 5.0);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);  // vocab_size unset
  cfg.vocab_size = 10;
  CHECK_NOTHROW(cfg.validate());
  cfg.dropout_keep = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.dropout_keep = 1.0;
  CHECK_NOTHROW(cfg.validate());

  const Seq2SeqConfig back = config_from_json(to_json(small_config()));
  CHECK(to_json(back) == to_json(small_config()));
}

TEST_CASE("initialization") {
  const Seq2Seq<float> a(small_config(1)), b(small_config(1)), c(small_config(2));
  CHECK(same_weights(a, b));
  CHECK_FALSE(same_weights(a, c));
  const auto &emb = a.tensors().front();
  CHECK(emb.name == "embedding");
  CHECK(emb.value.rows() == 16);
  CHECK(emb.value.cols() == 8);
  for (const auto &t: a.tensors())
    CHECK(t.value.allFinite());
  // Forget-gate slice of every recurrent bias starts at one.
  Seq2Seq<float> m(small_config());
  const auto &bias = m.tensor("decoder.0.bias").value;
  CHECK(bias.middleCols(8, 8).isOnes());
  CHECK(bias.leftCols(8).isZero());
}

TEST_CASE("encoder outputs") {
  Seq2SeqConfig cfg = small_config();
  Seq2Seq<double> model(cfg);
  CHECK(model.encoder_outputs({ 5, 6, 7 }).rows() == 3);
  CHECK(model.encoder_outputs({ 5, 6, 7 }).cols() == 16);
  CHECK(model.encoder_outputs({ 9 }).rows() == 1);

  // Batched encoding with padding gives the same per-source rows as
  // encoding each source alone.
  Tape<double> tape(false);
  const auto enc = model.encode(tape, { { 5, 6, 7, 8 }, { 9, 10 } });
  const auto &rows = tape.value(enc.values);
  CHECK(rows.topRows(4).isApprox(model.encoder_outputs({ 5, 6, 7, 8 }), 1e-12));
  CHECK(rows.bottomRows(2).isApprox(model.encoder_outputs({ 9, 10 }), 1e-12));
}

TEST_CASE("bidirectional reading symmetry") {
  Seq2SeqConfig cfg = small_config();
  cfg.encoder_layers = 1;
  Seq2Seq<double> model(cfg);
  Seq2Seq<double> swapped = model;
  std::swap(swapped.tensor("encoder.0.fwd.weight").value, swapped.tensor("encoder.0.bwd.weight").value);
  std::swap(swapped.tensor("encoder.0.fwd.bias").value, swapped.tensor("encoder.0.bwd.bias").value);

  const data::TokenSeq x = { 4, 9, 11, 5, 7 };
  const data::TokenSeq rev(x.rbegin(), x.rend());
  const auto out = model.encoder_outputs(x);
  const auto out_rev = swapped.encoder_outputs(rev);
  const int L = static_cast<int>(x.size()), H = cfg.hidden_dim;
  for (int i = 0; i < L; ++i) {
    CHECK(out.row(i).leftCols(H).isApprox(out_rev.row(L - 1 - i).rightCols(H), 1e-12));
    CHECK(out.row(i).rightCols(H).isApprox(out_rev.row(L - 1 - i).leftCols(H), 1e-12));
  }
  // Plain reversal does change the forward states.
  CHECK_FALSE(out.row(0).leftCols(H).isApprox(model.encoder_outputs(rev).row(L - 1).leftCols(H), 1e-6));
}

TEST_CASE("attention weights") {
  using Mat = Matrix<double>;
  Tape<double> tape(false);
  Mat keys = Mat::Random(3, 4), values = Mat::Random(3, 5), q = Mat::Random(2, 4), v = Mat::Random(1, 4);
  std::vector<std::vector<double>> w;

  // One position per source: weight exactly one, context equals the row.
  const auto ctx1 = tape.attention(tape.constant(keys), tape.constant(values), tape.constant(q),
                                   tape.constant(v), { 0, 1, 3 }, { 0, 1 }, &w);
  CHECK(w[0] == std::vector<double> { 1.0 });
  CHECK(tape.value(ctx1).row(0) == values.row(0));
  CHECK(std::abs(w[1][0] + w[1][1] - 1) < 1e-12);

  // v = 0 makes every score equal.
  const auto ctx0 = tape.attention(tape.constant(keys), tape.constant(values), tape.constant(q),
                                   tape.constant(Mat::Zero(1, 4)), { 0, 3 }, { 0, 0 }, &w);
  for (const auto &row: w) {
    for (double x: row)
      CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-15));
  }
  CHECK(tape.value(ctx0).row(0).isApprox(values.colwise().mean(), 1e-12));
  CHECK(tape.max_attention_deviation() < 1e-12);
}

TEST_CASE("attention gradient on a three-position toy") {
  using Mat = Matrix<double>;
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  auto random = [&](int r, int c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = u(gen);
    return m;
  };
  std::vector<Mat> inputs = { random(3, 4), random(3, 5), random(1, 4), random(1, 4) };
  std::vector<Mat> grads;
  for (const auto &m: inputs)
    grads.push_back(Mat::Zero(m.rows(), m.cols()));
  const Mat probe = random(1, 5);

  auto run = [&](bool record) {
    Tape<double> tape(record);
    std::vector<int> p;
    for (std::size_t k = 0; k < inputs.size(); ++k)
      p.push_back(tape.param(inputs[k], grads[k]));
    const auto ctx = tape.attention(p[0], p[1], p[2], p[3], { 0, 3 }, { 0 });
    // Scalar read-out: probe . context.
    Mat pr = probe.transpose();
    const auto out = tape.matmul(ctx, tape.constant(pr));
    const double value = tape.value(out)(0, 0);
    if (record)
      tape.backward(out);
    return value;
  };
  run(true);
  double worst = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (Eigen::Index i = 0; i < inputs[k].size(); ++i) {
      double &x = inputs[k].data()[i];
      const double keep = x;
      x = keep + 1e-5;
      const double up = run(false);
      x = keep - 1e-5;
      const double down = run(false);
      x = keep;
      worst = std::max(worst, testing::relative_error(grads[k].data()[i], (up - down) / 2e-5));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("full gradient check on the micro configuration") {
  const auto cfg = testing::micro_config(11);
  const auto batch = testing::random_pairs(3, cfg.vocab_size, 5, 12);
  const auto res = testing::gradient_check(cfg, batch);
  CAPTURE(res.worst_tensor);
  CHECK(res.max_relative_error < 1e-4);
  CHECK(res.per_tensor.size() == Seq2Seq<double>(cfg).tensors().size());
  for (std::size_t k = 0; k < res.per_tensor.size(); ++k) {
    CAPTURE(res.per_tensor[k].first);
    CHECK(res.grad_scale[k] > 1e-4);
  }
}

TEST_CASE("decode step") {
  Seq2SeqConfig cfg = small_config();
  Seq2Seq<float> model(cfg);
  Tape<float> tape(false);
  const auto enc = model.encode(tape, { { 5, 6, 7 } });
  const auto state = model.initial_state(tape, enc, { 0 });
  const auto a = model.decode_step(tape, enc, state, { Vocab::kBos }, { 0 });
  const auto b = model.decode_step(tape, enc, state, { Vocab::kBos }, { 0 });
  CHECK(tape.value(a.logits).cols() == cfg.vocab_size);
  CHECK(tape.value(a.logits) == tape.value(b.logits));
  const auto logp = log_softmax_rows<float>(tape.value(a.logits));
  CHECK(std::abs(logp.array().exp().sum() - 1) < 1e-6);

  // keep = 1 turns dropout into the identity.
  cfg.dropout_keep = 1.0;
  Seq2Seq<float> plain(cfg);
  std::mt19937_64 rng(1);
  Tape<float> t2(false);
  const auto e1 = plain.encode(t2, { { 5, 6, 7 } }, &rng);
  const auto s1 = plain.initial_state(t2, e1, { 0 });
  const auto with = plain.decode_step(t2, e1, s1, { Vocab::kBos }, { 0 }, &rng);
  const auto e2 = plain.encode(t2, { { 5, 6, 7 } });
  const auto s2 = plain.initial_state(t2, e2, { 0 });
  const auto without = plain.decode_step(t2, e2, s2, { Vocab::kBos }, { 0 });
  CHECK(t2.value(with.logits) == t2.value(without.logits));

  // With keep < 1 the dropout path really differs.
  Seq2Seq<float> dropped(small_config());
  Tape<float> t3(false);
  const auto e3 = dropped.encode(t3, { { 5, 6, 7 } }, &rng);
  const auto s3 = dropped.initial_state(t3, e3, { 0 });
  CHECK(t3.value(dropped.decode_step(t3, e3, s3, { Vocab::kBos }, { 0 }, &rng).logits)
        != tape.value(a.logits));
}

TEST_CASE("untrained loss is near ln V") {
  for (int vocab: { 16, 40 }) {
    Seq2SeqConfig cfg = small_config();
    cfg.vocab_size = vocab;
    const Seq2Seq<float> model(cfg);
    const auto pairs = testing::random_pairs(6, vocab, 10, 5);
    for (const auto &p: pairs) {
      const double loss = model.sequence_loss(p.src, p.tgt);
      CHECK(loss >= 0);
      CHECK(std::abs(loss - std::log(vocab)) < 0.1 * std::log(vocab));
    }
    const double ppl = perplexity(model, pairs, 4);
    double nll = 0;
    long n = 0;
    for (const auto &p: pairs) {
      nll += model.sequence_loss(p.src, p.tgt) * static_cast<double>(p.tgt.size());
      n += static_cast<long>(p.tgt.size());
    }
    CHECK(ppl == doctest::Approx(std::exp(nll / static_cast<double>(n))).epsilon(1e-5));
  }
}

TEST_CASE("train step") {
  Seq2SeqConfig cfg = small_config();
  cfg.learning_rate = 1e-3;
  cfg.dropout_keep = 1.0;
  const auto batch = testing::random_pairs(4, cfg.vocab_size, 8, 3);

  SUBCASE("loss strictly decreases on a fixed batch") {
    Seq2Seq<float> model(cfg);
    auto opt = OptimizerState<float>::zeros_like(model);
    double previous = INFINITY;
    int decreases = 0;
    for (int step = 0; step < 50; ++step) {
      const auto stats = train_step(model, opt, batch, nullptr);
      decreases += stats.loss < previous;
      previous = stats.loss;
    }
    CHECK(decreases == 50);
    CHECK(opt.step == 50);
  }
  SUBCASE("clip contract") {
    Seq2SeqConfig tight = cfg;
    tight.max_grad_norm = 0.05;
    Seq2Seq<float> model(tight);
    auto opt = OptimizerState<float>::zeros_like(model);
    for (int step = 0; step < 5; ++step) {
      const auto stats = train_step(model, opt, batch, nullptr);
      CHECK(stats.grad_norm > tight.max_grad_norm);
      CHECK(stats.clipped_norm <= tight.max_grad_norm + 1e-9);
    }
  }
  SUBCASE("zero learning rate leaves the weights alone") {
    Seq2SeqConfig frozen = cfg;
    frozen.learning_rate = 0;
    Seq2Seq<float> model(frozen);
    const Seq2Seq<float> before = model;
    auto opt = OptimizerState<float>::zeros_like(model);
    train_step(model, opt, batch, nullptr);
    CHECK(same_weights(model, before));
  }
  SUBCASE("non-finite loss aborts before the update") {
    Seq2Seq<float> model(cfg);
    model.tensor("output.bias").value(0, 4) = std::numeric_limits<float>::quiet_NaN();
    const Seq2Seq<float> before = model;
    auto opt = OptimizerState<float>::zeros_like(model);
    CHECK_THROWS_AS(train_step(model, opt, batch, nullptr), NonFiniteLoss);
    CHECK(opt.step == 0);
  }
  SUBCASE("training is deterministic with dropout") {
    Seq2SeqConfig d = cfg;
    d.dropout_keep = 0.8;
    Seq2Seq<float> m1(d), m2(d);
    auto o1 = OptimizerState<float>::zeros_like(m1), o2 = OptimizerState<float>::zeros_like(m2);
    std::mt19937_64 r1(4), r2(4);
    for (int step = 0; step < 5; ++step) {
      CHECK(train_step(m1, o1, batch, &r1).loss == train_step(m2, o2, batch, &r2).loss);
    }
    CHECK(same_weights(m1, m2));
  }
}

TEST_CASE("early stopping rule") {
  EarlyStopping once(1);
  CHECK_FALSE(once.observe(10));
  CHECK(once.observe(11));  // worse than the previous: stop at the second evaluation

  EarlyStopping improving(1);
  for (double p: { 10.0, 9.0, 8.0, 8.0 })
    CHECK_FALSE(improving.observe(p));

  EarlyStopping patient(2);
  CHECK_FALSE(patient.observe(5));
  CHECK_FALSE(patient.observe(6));
  CHECK_FALSE(patient.observe(4));
  CHECK_FALSE(patient.observe(5));
  CHECK(patient.observe(7));
}

TEST_CASE("fit schedule and best checkpoint") {
  Seq2SeqConfig cfg = small_config();
  cfg.learning_rate = 1e-3;
  const auto train = testing::random_pairs(10, cfg.vocab_size, 8, 21);
  const auto valid = testing::random_pairs(4, cfg.vocab_size, 8, 22);
  Seq2Seq<float> model(cfg);
  auto opt = OptimizerState<float>::zeros_like(model);
  FitOptions options;
  options.max_steps = 25;
  options.eval_interval = 10;
  options.patience = 100;
  long calls = 0;
  options.on_step = [&](long, const StepStats &) { ++calls; };
  const FitResult res = fit(model, opt, train, valid, options);
  REQUIRE(res.log.size() == 2);
  CHECK(res.log[0].step == 10);
  CHECK(res.log[1].step == 20);
  CHECK(calls == 25);
  CHECK(res.steps == 25);
  for (const auto &e: res.log)
    CHECK(res.best_perplexity <= e.valid_perplexity);
  // The model handed back is the best one.
  CHECK(perplexity(model, valid, 4) == doctest::Approx(res.best_perplexity).epsilon(1e-9));
  CHECK(opt.step == res.best_step);

  // Reruns are bitwise identical.
  Seq2Seq<float> again(cfg);
  auto opt2 = OptimizerState<float>::zeros_like(again);
  const FitResult res2 = fit(again, opt2, train, valid, options);
  CHECK(res2.log[1].train_loss == res.log[1].train_loss);
  CHECK(same_weights(model, again));

  const fs::path dir = scratch_dir("log");
  fs::create_directories(dir);
  write_training_log(dir / "log.csv", res.log);
  std::ifstream in(dir / "log.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,train_loss,valid_perplexity");
}

TEST_CASE("width-one beam equals greedy") {
  const auto model = testing::trained_toy_model(5);
  const Seq2Seq<float> wide(small_config(9));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 30; ++i) {
    data::TokenSeq src;
    const int len = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < len; ++k)
      src.push_back(3 + static_cast<int>(rng() % 2));
    const auto beam = beam_decode(model, src, 1);
    const auto greedy = greedy_decode(model, src);
    REQUIRE(beam.size() == 1);
    CHECK(beam[0].tokens == greedy.tokens);
    CHECK(beam[0].log_prob == doctest::Approx(greedy.log_prob).epsilon(1e-12));

    data::TokenSeq src2;
    for (int k = 0; k < len; ++k)
      src2.push_back(4 + static_cast<int>(rng() % 12));
    const auto b2 = beam_decode(wide, src2, 1);
    const auto g2 = greedy_decode(wide, src2);
    CHECK(b2[0].tokens == g2.tokens);
    CHECK(b2[0].complete == g2.complete);
  }
}

TEST_CASE("wide beam equals exhaustive enumeration on the toy") {
  const auto model = testing::trained_toy_model(5);
  const auto all = testing::enumerate_complete(5, 6);
  CHECK(all.size() == 63);
  for (const data::TokenSeq &src: { data::TokenSeq { 4 }, data::TokenSeq { 4, 3, 4 } }) {
    std::vector<std::pair<double, data::TokenSeq>> scored;
    for (const auto &seq: all)
      scored.emplace_back(sequence_log_prob(model, src, seq), seq);
    std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto beam = beam_decode(model, src, 127);
    REQUIRE(beam.size() == all.size());
    for (std::size_t k = 0; k < beam.size(); ++k) {
      CHECK(beam[k].complete);
      CHECK(beam[k].tokens == scored[k].second);
      CHECK(beam[k].log_prob == doctest::Approx(scored[k].first).epsilon(1e-9));
      CHECK(beam[k].log_prob <= 0);
    }
  }
}

TEST_CASE("beam properties") {
  const auto model = testing::trained_toy_model(8);
  for (const data::TokenSeq &src: { data::TokenSeq { 4, 4 }, data::TokenSeq { 3, 4, 3, 3 } }) {
    double previous = -INFINITY;
    for (int width: { 1, 2, 3, 5, 8, 20 }) {
      const auto beam = beam_decode(model, src, width);
      REQUIRE(!beam.empty());
      CHECK(static_cast<int>(beam.size()) <= width);
      for (std::size_t k = 1; k < beam.size(); ++k)
        CHECK(beam[k - 1].log_prob >= beam[k].log_prob);
      CHECK(beam[0].log_prob >= previous - 1e-12);
      previous = beam[0].log_prob;
    }
  }

  // Nothing completes within one step when EOS is not the best token:
  // the result falls back to flagged incomplete hypotheses.
  const auto short_run = beam_decode(model, { 4 }, 2, 1);
  CHECK(!short_run.empty());
  for (const auto &h: short_run)
    CHECK(h.complete == (h.tokens.back() == Vocab::kEos));
}

TEST_CASE("checkpoint round trip and errors") {
  Seq2SeqConfig cfg = small_config();
  cfg.learning_rate = 1e-3;
  Seq2Seq<float> model(cfg);
  auto opt = OptimizerState<float>::zeros_like(model);
  train_step(model, opt, testing::random_pairs(3, cfg.vocab_size, 6, 2), nullptr);

  const fs::path dir = scratch_dir("ckpt");
  save_checkpoint(model, opt, dir);
  const Checkpoint back = load_checkpoint(dir);
  CHECK(to_json(back.model.config()) == to_json(cfg));
  CHECK(same_weights(back.model, model));
  CHECK(back.optimizer.step == 1);
  for (std::size_t k = 0; k < opt.first.size(); ++k) {
    CHECK(back.optimizer.first[k] == opt.first[k]);
    CHECK(back.optimizer.second[k] == opt.second[k]);
  }

  Seq2SeqConfig other = cfg;
  other.vocab_size = 20;
  CHECK_THROWS_AS(load_checkpoint(dir, &other), ShapeMismatch);
  CHECK_NOTHROW(load_checkpoint(dir, &cfg));

  CHECK_THROWS_AS(load_checkpoint(scratch_dir("missing")), data::IoError);

  const std::string manifest_path = (dir / "manifest.json").string();
  std::string text;
  {
    std::ifstream in(manifest_path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto rewrite = [&](const std::string &body) { std::ofstream(manifest_path) << body; };

  rewrite(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_checkpoint(dir), data::FormatError);
  rewrite("[]");
  CHECK_THROWS_AS(load_checkpoint(dir), data::FormatError);
  std::string bumped = text;
  bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 9");
  rewrite(bumped);
  CHECK_THROWS_AS(load_checkpoint(dir), VersionMismatch);
  std::string no_tensors = text;
  no_tensors.replace(no_tensors.find("\"tensors\""), 9, "\"tensorz\"");
  rewrite(no_tensors);
  CHECK_THROWS_AS(load_checkpoint(dir), data::FormatError);

  rewrite(text);
  fs::resize_file(dir / "tensors.bin", 100);
  CHECK_THROWS_AS(load_checkpoint(dir), data::FormatError);
}

}  // namespace
}  // namespace retro::nn
