//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/nn/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace retro::nn {
namespace {

using data::Vocab;

double unit_uniform(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

template<class T>
Seq2Seq<T>::Seq2Seq(const Seq2SeqConfig &cfg): cfg_(cfg) {
  cfg_.validate();
  const int V = cfg_.vocab_size, E = cfg_.embedding_dim, H = cfg_.hidden_dim,
            A = cfg_.attention_dim;

  embedding_ = add_tensor("embedding", V, E);
  for (int l = 0; l < cfg_.encoder_layers; ++l) {
    const int in = l == 0 ? E : 2 * H;
    std::array<int, 2> w{}, b{};
    for (int d = 0; d < 2; ++d) {
      const std::string prefix = "encoder." + std::to_string(l) + (d == 0 ? ".fwd" : ".bwd");
      w[d] = add_tensor(prefix + ".weight", in + H, 4 * H);
      b[d] = add_tensor(prefix + ".bias", 1, 4 * H);
    }
    enc_w_.push_back(w);
    enc_b_.push_back(b);
  }
  bridge_w_ = add_tensor("bridge.weight", 4 * H, 2 * cfg_.decoder_layers * H);
  bridge_b_ = add_tensor("bridge.bias", 1, 2 * cfg_.decoder_layers * H);
  for (int l = 0; l < cfg_.decoder_layers; ++l) {
    const int in = l == 0 ? E + 2 * H : H;
    const std::string prefix = "decoder." + std::to_string(l);
    dec_w_.push_back(add_tensor(prefix + ".weight", in + H, 4 * H));
    dec_b_.push_back(add_tensor(prefix + ".bias", 1, 4 * H));
  }
  att_keys_ = add_tensor("attention.keys", 2 * H, A);
  att_query_ = add_tensor("attention.query", H, A);
  att_v_ = add_tensor("attention.v", 1, A);
  out_w_ = add_tensor("output.weight", 3 * H, V);
  out_b_ = add_tensor("output.bias", 1, V);

  std::mt19937_64 rng(cfg_.rng_seed);
  for (Tensor &t: tensors_) {
    const bool bias = t.name.ends_with(".bias");
    if (bias) {
      t.value.setZero();
      // LSTM gate order is input, forget, cell, output.
      if (t.name.starts_with("encoder.") || t.name.starts_with("decoder."))
        t.value.middleCols(H, H).setConstant(T(1));
      continue;
    }
    const double scale = t.name == "embedding" ? 0.1
                       : t.name == "attention.v" ? 1.0 / std::sqrt(static_cast<double>(A))
                                                 : 1.0 / std::sqrt(static_cast<double>(t.value.rows()));
    for (Eigen::Index i = 0; i < t.value.size(); ++i)
      t.value.data()[i] = static_cast<T>((2 * unit_uniform(rng) - 1) * scale);
  }
}

template<class T>
int Seq2Seq<T>::add_tensor(std::string name, int rows, int cols) {
  tensors_.push_back({ std::move(name), Mat::Zero(rows, cols), Mat::Zero(rows, cols) });
  return static_cast<int>(tensors_.size()) - 1;
}

template<class T>
typename Seq2Seq<T>::Tensor &Seq2Seq<T>::tensor(const std::string &name) {
  for (Tensor &t: tensors_) {
    if (t.name == name)
      return t;
  }
  throw std::out_of_range("no tensor named " + name);
}

template<class T>
void Seq2Seq<T>::zero_grad() {
  for (Tensor &t: tensors_)
    t.grad.setZero();
}

template<class T>
typename Seq2Seq<T>::Var Seq2Seq<T>::dropout(Tape<T> &tape, Var x, std::mt19937_64 *rng) const {
  if (!rng || cfg_.dropout_keep >= 1.0)
    return x;
  const Mat &v = tape.value(x);
  Mat mask(v.rows(), v.cols());
  const T keep_scale = static_cast<T>(1.0 / cfg_.dropout_keep);
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = unit_uniform(*rng) < cfg_.dropout_keep ? keep_scale : T(0);
  return tape.scale_by(x, std::move(mask));
}

template<class T>
typename Seq2Seq<T>::Var Seq2Seq<T>::lstm_layer_step(Tape<T> &tape, const std::vector<Var> &p, int w,
                                                     int b, Var x, Var h, Var c, Var *c_out) const {
  const Var gates = tape.add_row(tape.matmul(tape.concat_cols({ x, h }), p[w]), p[b]);
  const Var hc = tape.lstm_cell(gates, c);
  const int H = cfg_.hidden_dim;
  *c_out = tape.slice_cols(hc, H, H);
  return tape.slice_cols(hc, 0, H);
}

template<class T>
typename Seq2Seq<T>::Encoded Seq2Seq<T>::encode(Tape<T> &tape, const std::vector<data::TokenSeq> &srcs,
                                                std::mt19937_64 *rng) const {
  if (srcs.empty())
    throw std::invalid_argument("encode: empty batch");
  Encoded enc;
  for (const Tensor &t: tensors_)
    enc.params.push_back(tape.param(t.value, t.grad));
  const auto &p = enc.params;

  const int B = static_cast<int>(srcs.size());
  const int H = cfg_.hidden_dim;
  int L = 0;
  for (const auto &s: srcs) {
    if (s.empty())
      throw std::invalid_argument("encode: empty source");
    if (static_cast<int>(s.size()) > cfg_.max_seq_len)
      throw std::invalid_argument("encode: source longer than max_seq_len");
    L = std::max(L, static_cast<int>(s.size()));
  }

  std::vector<std::vector<char>> keep(L, std::vector<char>(B));
  std::vector<bool> all_kept(L, true);
  std::vector<Var> inputs(L);
  for (int t = 0; t < L; ++t) {
    std::vector<int> ids(B);
    for (int b = 0; b < B; ++b) {
      const bool inside = t < static_cast<int>(srcs[b].size());
      keep[t][b] = inside;
      all_kept[t] = all_kept[t] && inside;
      ids[b] = inside ? srcs[b][t] : Vocab::kPad;
    }
    inputs[t] = tape.embed(p[embedding_], std::move(ids));
    if (cfg_.dropout_embeddings)
      inputs[t] = dropout(tape, inputs[t], rng);
  }

  const Var zero = tape.constant(Mat::Zero(B, H));
  Var hf = zero, cf = zero, hb = zero, cb = zero;
  std::vector<Var> outputs(L);
  for (int l = 0; l < cfg_.encoder_layers; ++l) {
    std::vector<Var> fwd(L), bwd(L);
    for (int d = 0; d < 2; ++d) {
      Var h = zero, c = zero;
      for (int k = 0; k < L; ++k) {
        const int t = d == 0 ? k : L - 1 - k;
        Var c_new;
        const Var h_new = lstm_layer_step(tape, p, enc_w_[l][d], enc_b_[l][d], inputs[t], h, c, &c_new);
        if (all_kept[t]) {
          h = h_new;
          c = c_new;
        } else {
          // Rows past their length keep their state, so the backward
          // direction effectively starts at each row's last token.
          h = tape.select_rows(keep[t], h_new, h);
          c = tape.select_rows(keep[t], c_new, c);
        }
        (d == 0 ? fwd : bwd)[t] = h;
      }
      (d == 0 ? hf : hb) = h;
      (d == 0 ? cf : cb) = c;
    }
    for (int t = 0; t < L; ++t) {
      outputs[t] = tape.concat_cols({ fwd[t], bwd[t] });
      if (l + 1 < cfg_.encoder_layers)
        inputs[t] = dropout(tape, outputs[t], rng);
    }
  }

  std::vector<std::pair<Var, int>> rows;
  enc.offsets.push_back(0);
  for (int b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < srcs[b].size(); ++t)
      rows.emplace_back(outputs[t], b);
    enc.offsets.push_back(static_cast<int>(rows.size()));
  }
  enc.values = tape.gather_rows(std::move(rows));
  enc.keys = tape.matmul(enc.values, p[att_keys_]);

  const Var bridge = tape.add_row(tape.matmul(tape.concat_cols({ hf, hb, cf, cb }), p[bridge_w_]),
                                  p[bridge_b_]);
  for (int l = 0; l < cfg_.decoder_layers; ++l) {
    enc.h0.push_back(tape.slice_cols(bridge, 2 * l * H, H));
    enc.c0.push_back(tape.slice_cols(bridge, (2 * l + 1) * H, H));
  }
  return enc;
}

template<class T>
typename Seq2Seq<T>::State Seq2Seq<T>::initial_state(Tape<T> &tape, const Encoded &enc,
                                                     const std::vector<int> &src_of_row) const {
  const int sources = static_cast<int>(enc.offsets.size()) - 1;
  bool identity = static_cast<int>(src_of_row.size()) == sources;
  for (std::size_t b = 0; identity && b < src_of_row.size(); ++b)
    identity = src_of_row[b] == static_cast<int>(b);

  auto pick = [&](Var v) {
    if (identity)
      return v;
    std::vector<std::pair<Var, int>> rows;
    for (const int s: src_of_row)
      rows.emplace_back(v, s);
    return tape.gather_rows(std::move(rows));
  };
  State s;
  for (int l = 0; l < cfg_.decoder_layers; ++l) {
    s.h.push_back(pick(enc.h0[l]));
    s.c.push_back(pick(enc.c0[l]));
  }
  s.context = tape.constant(Mat::Zero(static_cast<Eigen::Index>(src_of_row.size()), 2 * cfg_.hidden_dim));
  return s;
}

template<class T>
typename Seq2Seq<T>::Step Seq2Seq<T>::decode_step(Tape<T> &tape, const Encoded &enc, const State &state,
                                                  const std::vector<int> &prev_tokens,
                                                  const std::vector<int> &src_of_row,
                                                  std::mt19937_64 *rng, bool want_attention) const {
  const auto &p = enc.params;
  Var emb = tape.embed(p[embedding_], prev_tokens);
  if (cfg_.dropout_embeddings)
    emb = dropout(tape, emb, rng);
  Var x = tape.concat_cols({ emb, state.context });

  Step step;
  for (int l = 0; l < cfg_.decoder_layers; ++l) {
    if (l > 0)
      x = dropout(tape, x, rng);
    Var c;
    x = lstm_layer_step(tape, p, dec_w_[l], dec_b_[l], x, state.h[l], state.c[l], &c);
    step.next.h.push_back(x);
    step.next.c.push_back(c);
  }
  const Var query = tape.matmul(x, p[att_query_]);
  step.next.context = tape.attention(enc.keys, enc.values, query, p[att_v_], enc.offsets, src_of_row,
                                     want_attention ? &step.attention : nullptr);
  step.logits = tape.add_row(tape.matmul(tape.concat_cols({ x, step.next.context }), p[out_w_]),
                             p[out_b_]);
  return step;
}

template<class T>
typename Seq2Seq<T>::Var Seq2Seq<T>::batch_loss(Tape<T> &tape, const std::vector<SeqPair> &batch,
                                                std::mt19937_64 *rng, double *nll_sum,
                                                long *tokens) const {
  std::vector<data::TokenSeq> srcs;
  int steps = 0;
  for (const SeqPair &pair: batch) {
    if (pair.tgt.empty())
      throw std::invalid_argument("batch_loss: empty target");
    srcs.push_back(pair.src);
    steps = std::max(steps, static_cast<int>(pair.tgt.size()));
  }
  const Encoded enc = encode(tape, srcs, rng);
  std::vector<int> rows(batch.size());
  std::iota(rows.begin(), rows.end(), 0);
  State state = initial_state(tape, enc, rows);

  std::vector<Var> logits;
  std::vector<std::vector<int>> targets;
  std::vector<std::vector<char>> weights;
  long count = 0;
  for (int k = 0; k < steps; ++k) {
    std::vector<int> prev(batch.size()), gold(batch.size());
    std::vector<char> w(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto &tgt = batch[b].tgt;
      const int len = static_cast<int>(tgt.size());
      prev[b] = k == 0 ? Vocab::kBos : (k - 1 < len ? tgt[k - 1] : Vocab::kPad);
      gold[b] = k < len ? tgt[k] : Vocab::kPad;
      w[b] = k < len;
      count += k < len;
    }
    Step step = decode_step(tape, enc, state, prev, rows, rng);
    logits.push_back(step.logits);
    targets.push_back(std::move(gold));
    weights.push_back(std::move(w));
    state = std::move(step.next);
  }
  if (tokens)
    *tokens = count;
  return tape.sequence_nll(std::move(logits), std::move(targets), std::move(weights),
                           static_cast<double>(count), nll_sum);
}

template<class T>
typename Seq2Seq<T>::Mat Seq2Seq<T>::encoder_outputs(const data::TokenSeq &src) const {
  Tape<T> tape(false);
  const Encoded enc = encode(tape, { src });
  return tape.value(enc.values);
}

template<class T>
double Seq2Seq<T>::sequence_loss(const data::TokenSeq &src, const data::TokenSeq &tgt) const {
  Tape<T> tape(false);
  double sum = 0;
  long count = 0;
  batch_loss(tape, { SeqPair{ src, tgt } }, nullptr, &sum, &count);
  return sum / static_cast<double>(count);
}

template class Seq2Seq<float>;
template class Seq2Seq<double>;

}  // namespace retro::nn
