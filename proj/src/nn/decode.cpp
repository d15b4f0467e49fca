//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/nn/decode.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace retro::nn {
namespace {

using data::Vocab;

bool emittable(int token) { return token != Vocab::kPad && token != Vocab::kBos; }

/// Decoder state of one hypothesis, detached from any tape.
template<class T>
struct RowState {
  std::vector<Matrix<T>> h, c;
  Matrix<T> context;
};

struct Beam {
  Hypothesis hyp;
  int state = -1;  // index into the row states of the current step
};

bool better(const Hypothesis &a, const Hypothesis &b) {
  if (a.log_prob != b.log_prob)
    return a.log_prob > b.log_prob;
  return a.tokens < b.tokens;
}

}  // namespace

template<class T>
Eigen::MatrixXd log_softmax_rows(const Matrix<T> &logits) {
  Eigen::MatrixXd out = logits.template cast<double>();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double mx = out.row(r).maxCoeff();
    const double lz = mx + std::log((out.row(r).array() - mx).exp().sum());
    out.row(r).array() -= lz;
  }
  return out;
}

template<class T>
std::vector<Hypothesis> beam_decode(const Seq2Seq<T> &model, const data::TokenSeq &src, int width,
                                    int max_len) {
  if (width <= 0)
    throw std::invalid_argument("beam_decode: width must be positive");
  if (max_len <= 0)
    max_len = model.config().max_decode_len;
  const int layers = model.config().decoder_layers;

  Tape<T> tape(false);
  const auto enc = model.encode(tape, { src });
  std::vector<RowState<T>> states(1);
  {
    const auto init = model.initial_state(tape, enc, { 0 });
    for (int l = 0; l < layers; ++l) {
      states[0].h.push_back(tape.value(init.h[l]));
      states[0].c.push_back(tape.value(init.c[l]));
    }
    states[0].context = tape.value(init.context);
  }
  std::vector<Beam> beams = { Beam{ Hypothesis{}, 0 } };

  for (int t = 0; t < max_len; ++t) {
    std::vector<int> active;
    for (std::size_t k = 0; k < beams.size(); ++k) {
      if (!beams[k].hyp.complete)
        active.push_back(static_cast<int>(k));
    }
    if (active.empty())
      break;

    // One batched decoder step over the unfinished hypotheses.
    const auto rows = static_cast<Eigen::Index>(active.size());
    typename Seq2Seq<T>::State in;
    for (int l = 0; l < layers; ++l) {
      Matrix<T> h(rows, states[0].h[l].cols()), c(rows, states[0].c[l].cols());
      for (Eigen::Index r = 0; r < rows; ++r) {
        h.row(r) = states[beams[active[r]].state].h[l];
        c.row(r) = states[beams[active[r]].state].c[l];
      }
      in.h.push_back(tape.constant(std::move(h)));
      in.c.push_back(tape.constant(std::move(c)));
    }
    Matrix<T> ctx(rows, states[0].context.cols());
    std::vector<int> prev(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Beam &b = beams[active[r]];
      ctx.row(r) = states[b.state].context;
      prev[r] = b.hyp.tokens.empty() ? Vocab::kBos : b.hyp.tokens.back();
    }
    in.context = tape.constant(std::move(ctx));
    const auto step = model.decode_step(tape, enc, in, prev, std::vector<int>(rows, 0));
    const Eigen::MatrixXd logp = log_softmax_rows<T>(tape.value(step.logits));

    std::vector<RowState<T>> next_states(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int l = 0; l < layers; ++l) {
        next_states[r].h.push_back(tape.value(step.next.h[l]).row(r));
        next_states[r].c.push_back(tape.value(step.next.c[l]).row(r));
      }
      next_states[r].context = tape.value(step.next.context).row(r);
    }

    std::vector<Beam> pool;
    for (const Beam &b: beams) {
      if (b.hyp.complete)
        pool.push_back(b);
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Hypothesis &parent = beams[active[r]].hyp;
      for (int v = 0; v < logp.cols(); ++v) {
        if (!emittable(v))
          continue;
        Beam child{ parent, static_cast<int>(r) };
        child.hyp.tokens.push_back(v);
        child.hyp.log_prob += logp(r, v);
        child.hyp.complete = v == Vocab::kEos;
        pool.push_back(std::move(child));
      }
    }
    const std::size_t keep = std::min<std::size_t>(width, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + keep, pool.end(),
                      [](const Beam &a, const Beam &b) { return better(a.hyp, b.hyp); });
    pool.resize(keep);
    beams = std::move(pool);
    states = std::move(next_states);
  }

  std::vector<Hypothesis> complete, partial;
  for (Beam &b: beams)
    (b.hyp.complete ? complete : partial).push_back(std::move(b.hyp));
  auto &out = complete.empty() ? partial : complete;
  std::sort(out.begin(), out.end(), better);
  return std::move(out);
}

template<class T>
Hypothesis greedy_decode(const Seq2Seq<T> &model, const data::TokenSeq &src, int max_len) {
  if (max_len <= 0)
    max_len = model.config().max_decode_len;
  Tape<T> tape(false);
  const auto enc = model.encode(tape, { src });
  auto state = model.initial_state(tape, enc, { 0 });
  Hypothesis hyp;
  int prev = Vocab::kBos;
  for (int t = 0; t < max_len && !hyp.complete; ++t) {
    auto step = model.decode_step(tape, enc, state, { prev }, { 0 });
    const Eigen::MatrixXd logp = log_softmax_rows<T>(tape.value(step.logits));
    int best = -1;
    for (int v = 0; v < logp.cols(); ++v) {
      if (emittable(v) && (best < 0 || logp(0, v) > logp(0, best)))
        best = v;
    }
    hyp.tokens.push_back(best);
    hyp.log_prob += logp(0, best);
    hyp.complete = best == Vocab::kEos;
    prev = best;
    state = std::move(step.next);
  }
  return hyp;
}

template<class T>
double sequence_log_prob(const Seq2Seq<T> &model, const data::TokenSeq &src,
                         const data::TokenSeq &tokens) {
  Tape<T> tape(false);
  const auto enc = model.encode(tape, { src });
  auto state = model.initial_state(tape, enc, { 0 });
  double total = 0;
  int prev = Vocab::kBos;
  for (const int tok: tokens) {
    auto step = model.decode_step(tape, enc, state, { prev }, { 0 });
    total += log_softmax_rows<T>(tape.value(step.logits))(0, tok);
    prev = tok;
    state = std::move(step.next);
  }
  return total;
}

#define RETRO_DECODE_INSTANTIATE(T)                                                                 \
  template Eigen::MatrixXd log_softmax_rows<T>(const Matrix<T> &);                                  \
  template Hypothesis greedy_decode(const Seq2Seq<T> &, const data::TokenSeq &, int);               \
  template std::vector<Hypothesis> beam_decode(const Seq2Seq<T> &, const data::TokenSeq &, int, int); \
  template double sequence_log_prob(const Seq2Seq<T> &, const data::TokenSeq &, const data::TokenSeq &);

RETRO_DECODE_INSTANTIATE(float)
RETRO_DECODE_INSTANTIATE(double)

}  // namespace retro::nn
