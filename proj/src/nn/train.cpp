//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/nn/train.h"

#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "retro/data/reaction.h"

namespace retro::nn {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

template<class T>
double global_norm(const Seq2Seq<T> &model) {
  double sq = 0;
  for (const auto &t: model.tensors()) {
    for (Eigen::Index i = 0; i < t.grad.size(); ++i) {
      const double g = static_cast<double>(t.grad.data()[i]);
      sq += g * g;
    }
  }
  return std::sqrt(sq);
}

}  // namespace

bool EarlyStopping::observe(double perplexity) {
  worse_ = perplexity > previous_ ? worse_ + 1 : 0;
  previous_ = perplexity;
  return worse_ >= patience_;
}

template<class T>
OptimizerState<T> OptimizerState<T>::zeros_like(const Seq2Seq<T> &model) {
  OptimizerState s;
  for (const auto &t: model.tensors()) {
    s.first.push_back(Matrix<T>::Zero(t.value.rows(), t.value.cols()));
    s.second.push_back(Matrix<T>::Zero(t.value.rows(), t.value.cols()));
  }
  return s;
}

template<class T>
StepStats train_step(Seq2Seq<T> &model, OptimizerState<T> &opt, const std::vector<SeqPair> &batch,
                     std::mt19937_64 *dropout_rng) {
  if (batch.empty())
    throw std::invalid_argument("train_step: empty batch");
  const Seq2SeqConfig &cfg = model.config();
  model.zero_grad();

  StepStats stats;
  Tape<T> tape;
  double nll = 0;
  long tokens = 0;
  const auto loss = model.batch_loss(tape, batch, dropout_rng, &nll, &tokens);
  stats.loss = nll / static_cast<double>(tokens);
  stats.attention_deviation = tape.max_attention_deviation();
  if (!std::isfinite(stats.loss))
    throw NonFiniteLoss(fmt::format("non-finite loss at step {}", opt.step + 1));
  tape.backward(loss);

  stats.grad_norm = global_norm(model);
  if (!std::isfinite(stats.grad_norm))
    throw NonFiniteLoss(fmt::format("non-finite gradient at step {}", opt.step + 1));
  if (stats.grad_norm > cfg.max_grad_norm) {
    // A hair under the bound so rounding in T cannot push the result over.
    const T scale = static_cast<T>(cfg.max_grad_norm / stats.grad_norm * (1 - 1e-6));
    for (auto &t: model.tensors())
      t.grad *= scale;
    stats.clipped_norm = global_norm(model);
  } else {
    stats.clipped_norm = stats.grad_norm;
  }

  ++opt.step;
  const double lr = cfg.learning_rate;
  if (lr == 0)
    return stats;
  const double c1 = 1 - std::pow(kBeta1, static_cast<double>(opt.step));
  const double c2 = 1 - std::pow(kBeta2, static_cast<double>(opt.step));
  auto &tensors = model.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    auto &m = opt.first[k];
    auto &v = opt.second[k];
    const auto &g = tensors[k].grad;
    m = T(kBeta1) * m + T(1 - kBeta1) * g;
    v = T(kBeta2) * v + T(1 - kBeta2) * g.cwiseProduct(g);
    auto &w = tensors[k].value;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double mh = static_cast<double>(m.data()[i]) / c1;
      const double vh = static_cast<double>(v.data()[i]) / c2;
      w.data()[i] -= static_cast<T>(lr * mh / (std::sqrt(vh) + kEpsilon));
    }
  }
  return stats;
}

template<class T>
double perplexity(const Seq2Seq<T> &model, const std::vector<SeqPair> &pairs, int batch_size) {
  double nll = 0;
  long tokens = 0;
  for (std::size_t at = 0; at < pairs.size(); at += batch_size) {
    const std::vector<SeqPair> batch(pairs.begin() + at,
                                     pairs.begin() + std::min(pairs.size(), at + batch_size));
    Tape<T> tape(false);
    double s = 0;
    long n = 0;
    model.batch_loss(tape, batch, nullptr, &s, &n);
    nll += s;
    tokens += n;
  }
  return tokens == 0 ? 1.0 : std::exp(nll / static_cast<double>(tokens));
}

template<class T>
FitResult fit(Seq2Seq<T> &model, OptimizerState<T> &opt, const std::vector<SeqPair> &train,
              const std::vector<SeqPair> &valid, const FitOptions &options) {
  if (train.empty())
    throw std::invalid_argument("fit: empty training set");
  if (options.eval_interval <= 0 || options.patience <= 0)
    throw std::invalid_argument("fit: eval_interval and patience must be positive");
  const Seq2SeqConfig &cfg = model.config();
  std::mt19937_64 order_rng(cfg.rng_seed ^ 0x5eedULL);
  std::mt19937_64 dropout_rng(cfg.rng_seed + 1);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  FitResult result;
  auto best_model = model.tensors();
  auto best_opt = opt;
  EarlyStopping stopper(options.patience);
  double loss_sum = 0;
  long loss_steps = 0;

  for (long step = 1; step <= options.max_steps; ++step) {
    std::vector<SeqPair> batch;
    while (static_cast<int>(batch.size()) < cfg.batch_size) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i)
          std::swap(order[i - 1], order[order_rng() % i]);
        cursor = 0;
      }
      batch.push_back(train[order[cursor++]]);
      if (batch.size() == train.size())
        break;
    }
    const StepStats stats = train_step(model, opt, batch, &dropout_rng);
    result.steps = step;
    loss_sum += stats.loss;
    ++loss_steps;
    if (options.on_step)
      options.on_step(step, stats);

    if (step % options.eval_interval != 0)
      continue;
    const double ppl = perplexity(model, valid.empty() ? train : valid, cfg.batch_size);
    result.log.push_back({ step, loss_sum / static_cast<double>(loss_steps), ppl });
    loss_sum = 0;
    loss_steps = 0;
    if (result.log.size() == 1 || ppl < result.best_perplexity) {
      result.best_perplexity = ppl;
      result.best_step = step;
      best_model = model.tensors();
      best_opt = opt;
    }
    if (stopper.observe(ppl)) {
      result.stopped_early = true;
      break;
    }
  }
  if (!result.log.empty()) {
    model.tensors() = std::move(best_model);
    opt = std::move(best_opt);
  }
  return result;
}

void write_training_log(const std::filesystem::path &path, const std::vector<EvalPoint> &log) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw data::IoError("cannot write " + path.string());
  out << "step,train_loss,valid_perplexity\n";
  for (const EvalPoint &e: log)
    out << fmt::format("{},{:.6f},{:.6f}\n", e.step, e.train_loss, e.valid_perplexity);
}

template struct OptimizerState<float>;
template struct OptimizerState<double>;
template StepStats train_step(Seq2Seq<float> &, OptimizerState<float> &, const std::vector<SeqPair> &,
                              std::mt19937_64 *);
template StepStats train_step(Seq2Seq<double> &, OptimizerState<double> &,
                              const std::vector<SeqPair> &, std::mt19937_64 *);
template double perplexity(const Seq2Seq<float> &, const std::vector<SeqPair> &, int);
template double perplexity(const Seq2Seq<double> &, const std::vector<SeqPair> &, int);
template FitResult fit(Seq2Seq<float> &, OptimizerState<float> &, const std::vector<SeqPair> &,
                       const std::vector<SeqPair> &, const FitOptions &);
template FitResult fit(Seq2Seq<double> &, OptimizerState<double> &, const std::vector<SeqPair> &,
                       const std::vector<SeqPair> &, const FitOptions &);

}  // namespace retro::nn
