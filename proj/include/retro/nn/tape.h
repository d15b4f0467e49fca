//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace retro::nn {

template<class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * Reverse-mode autodiff over dense row-major matrices. Every op appends a
 * node holding its value and, when recording, a closure that pushes the
 * node's gradient to its inputs. Parameters are referenced, not copied, and
 * their gradients accumulate straight into caller-owned buffers.
 *
 * Activations are laid out one row per batch item.
 */
template<class T>
class Tape {
public:
  using Mat = Matrix<T>;
  using Var = int;

  explicit Tape(bool record = true): record_(record) { }

  bool recording() const { return record_; }

  const Mat &value(Var v) const { return nodes_[v].ref ? *nodes_[v].ref : nodes_[v].value; }

  Var constant(Mat m) { return push(std::move(m)); }

  /// A parameter; its gradient is added to `grad` (same shape) by backward().
  Var param(const Mat &value, Mat &grad) {
    Node n;
    n.ref = &value;
    n.param_grad = &grad;
    nodes_.push_back(std::move(n));
    return static_cast<Var>(nodes_.size()) - 1;
  }

  Var matmul(Var a, Var b) {
    const Var out = push(value(a) * value(b));
    on_backward(out, [a, b](Tape &t, const Mat &g) {
      t.accumulate(a, g * t.value(b).transpose());
      t.accumulate(b, t.value(a).transpose() * g);
    });
    return out;
  }

  Var add(Var a, Var b) {
    const Var out = push(value(a) + value(b));
    on_backward(out, [a, b](Tape &t, const Mat &g) {
      t.accumulate(a, g);
      t.accumulate(b, g);
    });
    return out;
  }

  /// a (n x m) plus the 1 x m row `bias` on every row.
  Var add_row(Var a, Var bias) {
    Mat v = value(a);
    v.rowwise() += value(bias).row(0);
    const Var out = push(std::move(v));
    on_backward(out, [a, bias](Tape &t, const Mat &g) {
      t.accumulate(a, g);
      t.accumulate(bias, g.colwise().sum());
    });
    return out;
  }

  Var mul(Var a, Var b) {
    const Var out = push(value(a).cwiseProduct(value(b)));
    on_backward(out, [a, b](Tape &t, const Mat &g) {
      t.accumulate(a, g.cwiseProduct(t.value(b)));
      t.accumulate(b, g.cwiseProduct(t.value(a)));
    });
    return out;
  }

  Var tanh(Var a) {
    const Var out = push(value(a).array().tanh().matrix());
    on_backward(out, [out](Tape &t, const Mat &g) {
      const Mat &y = t.value(out);
      t.accumulate(t.input0(out), g.cwiseProduct((1 - y.array().square()).matrix()));
    });
    nodes_[out].input0 = a;
    return out;
  }

  Var concat_cols(std::span<const Var> parts) {
    Eigen::Index rows = value(parts[0]).rows();
    Eigen::Index cols = 0;
    for (const Var p: parts)
      cols += value(p).cols();
    Mat v(rows, cols);
    Eigen::Index at = 0;
    for (const Var p: parts) {
      v.middleCols(at, value(p).cols()) = value(p);
      at += value(p).cols();
    }
    const Var out = push(std::move(v));
    std::vector<Var> inputs(parts.begin(), parts.end());
    on_backward(out, [inputs](Tape &t, const Mat &g) {
      Eigen::Index at = 0;
      for (const Var p: inputs) {
        const Eigen::Index c = t.value(p).cols();
        t.accumulate(p, g.middleCols(at, c));
        at += c;
      }
    });
    return out;
  }

  Var concat_cols(std::initializer_list<Var> parts) {
    return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
  }

  Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
    const Var out = push(value(a).middleCols(start, count));
    on_backward(out, [a, start, count](Tape &t, const Mat &g) {
      Mat full = Mat::Zero(t.value(a).rows(), t.value(a).cols());
      full.middleCols(start, count) = g;
      t.accumulate(a, full);
    });
    return out;
  }

  /// Rows of `table` selected by `ids`.
  Var embed(Var table, std::vector<int> ids) {
    const Mat &tab = value(table);
    Mat v(static_cast<Eigen::Index>(ids.size()), tab.cols());
    for (std::size_t r = 0; r < ids.size(); ++r)
      v.row(r) = tab.row(ids[r]);
    const Var out = push(std::move(v));
    on_backward(out, [table, ids = std::move(ids)](Tape &t, const Mat &g) {
      Mat &dt = t.grad_of(table);
      for (std::size_t r = 0; r < ids.size(); ++r)
        dt.row(ids[r]) += g.row(r);
    });
    return out;
  }

  /// Per-row blend keep[r] ? fresh : old, with keep given as 0/1.
  Var select_rows(const std::vector<char> &keep, Var fresh, Var old) {
    Mat v = value(old);
    for (std::size_t r = 0; r < keep.size(); ++r) {
      if (keep[r])
        v.row(r) = value(fresh).row(r);
    }
    const Var out = push(std::move(v));
    on_backward(out, [keep, fresh, old](Tape &t, const Mat &g) {
      Mat gf = Mat::Zero(g.rows(), g.cols());
      Mat go = Mat::Zero(g.rows(), g.cols());
      for (std::size_t r = 0; r < keep.size(); ++r)
        (keep[r] ? gf : go).row(r) = g.row(r);
      t.accumulate(fresh, gf);
      t.accumulate(old, go);
    });
    return out;
  }

  /// Elementwise product with a constant mask (inverted dropout).
  Var scale_by(Var a, Mat mask) {
    const Var out = push(value(a).cwiseProduct(mask));
    on_backward(out, [a, mask = std::move(mask)](Tape &t, const Mat &g) {
      t.accumulate(a, g.cwiseProduct(mask));
    });
    return out;
  }

  /// Rows gathered from several row-major sources: out.row(k) =
  /// value(rows[k].first).row(rows[k].second).
  Var gather_rows(std::vector<std::pair<Var, int>> rows) {
    const Eigen::Index cols = value(rows[0].first).cols();
    Mat v(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t k = 0; k < rows.size(); ++k)
      v.row(k) = value(rows[k].first).row(rows[k].second);
    const Var out = push(std::move(v));
    on_backward(out, [rows = std::move(rows)](Tape &t, const Mat &g) {
      for (std::size_t k = 0; k < rows.size(); ++k)
        t.grad_of(rows[k].first).row(rows[k].second) += g.row(k);
    });
    return out;
  }

  /**
   * Long short-term memory cell. `gates` holds the pre-activations of the
   * input, forget, cell and output gates side by side (B x 4h). Returns
   * [h | c] (B x 2h).
   */
  Var lstm_cell(Var gates, Var c_prev) {
    const Mat &z = value(gates);
    const Eigen::Index h = z.cols() / 4;
    auto sigmoid = [](const auto &x) { return (1 / (1 + (-x.array()).exp())).matrix(); };
    Mat i = sigmoid(z.middleCols(0, h));
    Mat f = sigmoid(z.middleCols(h, h));
    Mat g = z.middleCols(2 * h, h).array().tanh().matrix();
    Mat o = sigmoid(z.middleCols(3 * h, h));
    Mat c = f.cwiseProduct(value(c_prev)) + i.cwiseProduct(g);
    Mat tc = c.array().tanh().matrix();
    Mat out_v(z.rows(), 2 * h);
    out_v.leftCols(h) = o.cwiseProduct(tc);
    out_v.rightCols(h) = c;
    const Var out = push(std::move(out_v));
    if (!record_)
      return out;
    on_backward(out, [gates, c_prev, h, i = std::move(i), f = std::move(f), g = std::move(g),
                      o = std::move(o), tc = std::move(tc)](Tape &t, const Mat &grad) {
      const Mat dh = grad.leftCols(h);
      const Mat dc = grad.rightCols(h)
                     + dh.cwiseProduct(o).cwiseProduct((1 - tc.array().square()).matrix());
      const Mat &cp = t.value(c_prev);
      Mat dz(grad.rows(), 4 * h);
      dz.middleCols(0, h) = dc.cwiseProduct(g).cwiseProduct(i.cwiseProduct((1 - i.array()).matrix()));
      dz.middleCols(h, h) = dc.cwiseProduct(cp).cwiseProduct(f.cwiseProduct((1 - f.array()).matrix()));
      dz.middleCols(2 * h, h) = dc.cwiseProduct(i).cwiseProduct((1 - g.array().square()).matrix());
      dz.middleCols(3 * h, h) = dh.cwiseProduct(tc).cwiseProduct(o.cwiseProduct((1 - o.array()).matrix()));
      t.accumulate(gates, dz);
      t.accumulate(c_prev, dc.cwiseProduct(f));
    });
    return out;
  }

  /**
   * Additive attention. `keys` (N x a) and `values` (N x d) hold the encoder
   * rows of every source back to back; source s owns rows
   * [offsets[s], offsets[s+1]). Query row b (from `query`, B x a) attends to
   * source src_of_row[b]:
   *   score_r = v . tanh(keys_r + query_b),  weights = softmax over the rows,
   *   context_b = sum_r weight_r values_r.
   * Returns the B x d contexts. `weights_out`, when given, receives the
   * weights of each query row.
   */
  Var attention(Var keys, Var values, Var query, Var v, std::vector<int> offsets,
                std::vector<int> src_of_row, std::vector<std::vector<T>> *weights_out = nullptr) {
    const Mat &K = value(keys);
    const Mat &H = value(values);
    const Mat &Q = value(query);
    const auto vrow = value(v).row(0);
    const Eigen::Index B = Q.rows();

    Mat ctx = Mat::Zero(B, H.cols());
    std::vector<Mat> act(B);       // tanh activations per query row
    std::vector<std::vector<T>> alpha(B);
    for (Eigen::Index b = 0; b < B; ++b) {
      const int s = src_of_row[b];
      const int lo = offsets[s];
      const int n = offsets[s + 1] - lo;
      Mat u = K.middleRows(lo, n);
      u.rowwise() += Q.row(b);
      u = u.array().tanh().matrix();
      std::vector<double> e(n);
      double mx = -INFINITY;
      for (int r = 0; r < n; ++r) {
        e[r] = static_cast<double>(u.row(r).dot(vrow));
        mx = std::max(mx, e[r]);
      }
      double total = 0;
      for (int r = 0; r < n; ++r) {
        e[r] = std::exp(e[r] - mx);
        total += e[r];
      }
      alpha[b].resize(n);
      double sum = 0;
      for (int r = 0; r < n; ++r) {
        alpha[b][r] = static_cast<T>(e[r] / total);
        sum += static_cast<double>(alpha[b][r]);
        ctx.row(b) += alpha[b][r] * H.row(lo + r);
      }
      max_attention_deviation_ = std::max(max_attention_deviation_, std::abs(sum - 1.0));
      act[b] = std::move(u);
    }
    if (weights_out)
      *weights_out = alpha;
    const Var out = push(std::move(ctx));
    if (!record_)
      return out;
    on_backward(out, [=, act = std::move(act), alpha = std::move(alpha),
                      offsets = std::move(offsets), src_of_row = std::move(src_of_row)](
                         Tape &t, const Mat &g) {
      const Mat &Hv = t.value(values);
      const auto vr = t.value(v).row(0);
      Mat &dK = t.grad_of(keys);
      Mat &dH = t.grad_of(values);
      Mat &dQ = t.grad_of(query);
      Mat &dv = t.grad_of(v);
      for (Eigen::Index b = 0; b < g.rows(); ++b) {
        const int s = src_of_row[b];
        const int lo = offsets[s];
        const int n = offsets[s + 1] - lo;
        std::vector<T> da(n);
        T mean = 0;
        for (int r = 0; r < n; ++r) {
          da[r] = g.row(b).dot(Hv.row(lo + r));
          mean += alpha[b][r] * da[r];
          dH.row(lo + r) += alpha[b][r] * g.row(b);
        }
        for (int r = 0; r < n; ++r) {
          const T de = alpha[b][r] * (da[r] - mean);
          dv.row(0) += de * act[b].row(r);
          const auto dpre = (de * vr.array() * (1 - act[b].row(r).array().square())).matrix();
          dK.row(lo + r) += dpre;
          dQ.row(b) += dpre;
        }
      }
    });
    return out;
  }

  /**
   * Summed weighted negative log-likelihood over several steps of logits,
   * divided by `denominator`; a 1 x 1 node. targets[k][b] is the gold token
   * of row b at step k and weights[k][b] is 0 for padding. The sum is formed
   * in double and also returned through `nll_sum`.
   */
  Var sequence_nll(std::vector<Var> logits, std::vector<std::vector<int>> targets,
                   std::vector<std::vector<char>> weights, double denominator,
                   double *nll_sum = nullptr) {
    double total = 0;
    std::vector<Mat> probs(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
      const Mat &z = value(logits[k]);
      Mat p(z.rows(), z.cols());
      for (Eigen::Index b = 0; b < z.rows(); ++b) {
        const double mx = static_cast<double>(z.row(b).maxCoeff());
        double sum = 0;
        for (Eigen::Index j = 0; j < z.cols(); ++j)
          sum += std::exp(static_cast<double>(z(b, j)) - mx);
        const double log_z = mx + std::log(sum);
        for (Eigen::Index j = 0; j < z.cols(); ++j)
          p(b, j) = static_cast<T>(std::exp(static_cast<double>(z(b, j)) - log_z));
        if (weights[k][b])
          total += log_z - static_cast<double>(z(b, targets[k][b]));
      }
      probs[k] = std::move(p);
    }
    if (nll_sum)
      *nll_sum = total;
    Mat v(1, 1);
    v(0, 0) = static_cast<T>(total / denominator);
    const Var out = push(std::move(v));
    if (!record_)
      return out;
    on_backward(out, [logits = std::move(logits), targets = std::move(targets),
                      weights = std::move(weights), probs = std::move(probs),
                      denominator](Tape &t, const Mat &g) {
      const T scale = g(0, 0) / static_cast<T>(denominator);
      for (std::size_t k = 0; k < logits.size(); ++k) {
        Mat d = probs[k];
        for (Eigen::Index b = 0; b < d.rows(); ++b) {
          if (weights[k][b]) {
            d(b, targets[k][b]) -= 1;
            d.row(b) *= scale;
          } else {
            d.row(b).setZero();
          }
        }
        t.accumulate(logits[k], d);
      }
    });
    return out;
  }

  /// Seeds d(out)/d(out) = 1 and runs every recorded closure in reverse.
  void backward(Var out) {
    if (!record_)
      throw std::logic_error("backward on a non-recording tape");
    grad_of(out).setOnes();
    for (Var k = out; k >= 0; --k) {
      Node &n = nodes_[k];
      if (!n.backward || n.grad.size() == 0)
        continue;
      n.backward(*this, n.grad);
    }
  }

  double max_attention_deviation() const { return max_attention_deviation_; }

  Mat &grad_of(Var v) {
    Node &n = nodes_[v];
    if (n.param_grad)
      return *n.param_grad;
    if (n.grad.size() == 0)
      n.grad = Mat::Zero(value(v).rows(), value(v).cols());
    return n.grad;
  }

private:
  struct Node {
    Mat value;
    const Mat *ref = nullptr;
    Mat *param_grad = nullptr;
    Mat grad;
    std::function<void(Tape &, const Mat &)> backward;
    Var input0 = -1;
  };

  Var push(Mat m) {
    Node n;
    n.value = std::move(m);
    nodes_.push_back(std::move(n));
    return static_cast<Var>(nodes_.size()) - 1;
  }

  template<class F>
  void on_backward(Var out, F &&f) {
    if (record_)
      nodes_[out].backward = std::forward<F>(f);
  }

  void accumulate(Var v, const Mat &g) {
    if (v < 0)
      return;
    Node &n = nodes_[v];
    if (!n.param_grad && !record_)
      return;
    grad_of(v) += g;
  }

  Var input0(Var v) const { return nodes_[v].input0; }

  std::vector<Node> nodes_;
  bool record_;
  double max_attention_deviation_ = 0;
};

}  // namespace retro::nn
