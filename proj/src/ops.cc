// Copyright 2026 The MTEAD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtead/ops.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "mtead/error.h"

namespace mtead {
namespace {

// A null graph means plain inference.
void RecordOn(Graph *g, std::initializer_list<Tensor> inputs, Tensor output, Graph::BackwardFn fn) {
  if (g != nullptr) g->Record(inputs, std::move(output), std::move(fn));
}

void RecordOn(Graph *g, const std::vector<Tensor> &inputs, Tensor output, Graph::BackwardFn fn) {
  if (g != nullptr) g->Record(inputs, std::move(output), std::move(fn));
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using RowArr = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ConstMatMap View(const Tensor &t, std::size_t rows, std::size_t cols) {
  return ConstMatMap(t.ptr(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MatMap ViewGrad(const Tensor &t, std::size_t rows, std::size_t cols) {
  return MatMap(t.grad_ptr(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

ConstMatMap ViewOutGrad(const Tensor &t, std::size_t rows, std::size_t cols) {
  return ConstMatMap(t.grad().data(), static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(cols));
}

void RequireRank(const Tensor &t, std::size_t rank, const char *op) {
  if (!t.defined() || t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     (t.defined() ? ShapeToString(t.dims()) : std::string("undefined")));
  }
}

void RequireSameDims(const Tensor &a, const Tensor &b, const char *op) {
  if (a.dims() != b.dims()) {
    throw ShapeError(std::string(op) + ": dims differ " + ShapeToString(a.dims()) + " vs " +
                     ShapeToString(b.dims()));
  }
}

// Vectorizable forms built on exp; both saturate to the exact limits
// instead of overflowing to NaN.
template <class D>
auto FastSigmoid(const Eigen::ArrayBase<D> &x) {
  return (1.0 + (-x).exp()).inverse();
}

template <class D>
auto FastTanh(const Eigen::ArrayBase<D> &x) {
  return 1.0 - 2.0 / ((2.0 * x).exp() + 1.0);
}

double StableSigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Elementwise unary op where the derivative is a function of (x, y).
template <class Fwd, class Deriv>
Tensor Unary(Graph *g, const Tensor &x, Fwd fwd, Deriv deriv) {
  Tensor out(x.dims());
  const double *xp = x.ptr();
  double *yp = out.ptr();
  for (std::size_t i = 0; i < x.numel(); ++i) yp[i] = fwd(xp[i]);
  RecordOn(g, {x}, out, [x, out, deriv]() mutable {
    if (!x.requires_grad()) return;
    auto gx = x.grad();
    auto gy = out.grad();
    const double *xp = x.ptr();
    const double *yp = out.ptr();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * deriv(xp[i], yp[i]);
  });
  return out;
}

}  // namespace

Tensor MatMul(Graph *g, const Tensor &a, const Tensor &b) {
  RequireRank(a, 2, "matmul");
  RequireRank(b, 2, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dims differ " + ShapeToString(a.dims()) + " * " +
                     ShapeToString(b.dims()));
  }
  Tensor out({m, n});
  MatMap(out.ptr(), m, n).noalias() = View(a, m, k) * View(b, k, n);
  RecordOn(g, {a, b}, out, [a, b, out, m, k, n]() mutable {
    auto gc = ViewOutGrad(out, m, n);
    if (a.requires_grad()) ViewGrad(a, m, k).noalias() += gc * View(b, k, n).transpose();
    if (b.requires_grad()) ViewGrad(b, k, n).noalias() += View(a, m, k).transpose() * gc;
  });
  return out;
}

Tensor Add(Graph *g, const Tensor &a, const Tensor &b) {
  RequireSameDims(a, b, "add");
  Tensor out(a.dims());
  for (std::size_t i = 0; i < a.numel(); ++i) out.ptr()[i] = a.ptr()[i] + b.ptr()[i];
  RecordOn(g, {a, b}, out, [a, b, out]() mutable {
    auto gy = out.grad();
    if (a.requires_grad()) {
      auto ga = a.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
    }
    if (b.requires_grad()) {
      auto gb = b.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i];
    }
  });
  return out;
}

Tensor Sub(Graph *g, const Tensor &a, const Tensor &b) {
  RequireSameDims(a, b, "sub");
  Tensor out(a.dims());
  for (std::size_t i = 0; i < a.numel(); ++i) out.ptr()[i] = a.ptr()[i] - b.ptr()[i];
  RecordOn(g, {a, b}, out, [a, b, out]() mutable {
    auto gy = out.grad();
    if (a.requires_grad()) {
      auto ga = a.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
    }
    if (b.requires_grad()) {
      auto gb = b.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] -= gy[i];
    }
  });
  return out;
}

Tensor Mul(Graph *g, const Tensor &a, const Tensor &b) {
  RequireSameDims(a, b, "mul");
  Tensor out(a.dims());
  for (std::size_t i = 0; i < a.numel(); ++i) out.ptr()[i] = a.ptr()[i] * b.ptr()[i];
  RecordOn(g, {a, b}, out, [a, b, out]() mutable {
    auto gy = out.grad();
    if (a.requires_grad()) {
      auto ga = a.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * b.ptr()[i];
    }
    if (b.requires_grad()) {
      auto gb = b.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * a.ptr()[i];
    }
  });
  return out;
}

Tensor Scale(Graph *g, const Tensor &a, double s) {
  Tensor out(a.dims());
  for (std::size_t i = 0; i < a.numel(); ++i) out.ptr()[i] = a.ptr()[i] * s;
  RecordOn(g, {a}, out, [a, out, s]() mutable {
    auto ga = a.grad();
    auto gy = out.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * s;
  });
  return out;
}

Tensor AddBias(Graph *g, const Tensor &x, const Tensor &bias) {
  RequireRank(bias, 1, "add_bias");
  const std::size_t c = bias.dim(0);
  if (x.dims().back() != c) {
    throw ShapeError("add_bias: last dim of " + ShapeToString(x.dims()) + " != " +
                     std::to_string(c));
  }
  const std::size_t rows = x.numel() / c;
  Tensor out(x.dims());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < c; ++j) out.ptr()[r * c + j] = x.ptr()[r * c + j] + bias.ptr()[j];
  }
  RecordOn(g, {x, bias}, out, [x, bias, out, rows, c]() mutable {
    auto gy = out.grad();
    if (x.requires_grad()) {
      auto gx = x.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
    }
    if (bias.requires_grad()) {
      auto gb = bias.grad();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < c; ++j) gb[j] += gy[r * c + j];
      }
    }
  });
  return out;
}

Tensor Sigmoid(Graph *g, const Tensor &x) {
  return Unary(g, x, StableSigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor Tanh(Graph *g, const Tensor &x) {
  return Unary(g, x, [](double v) { return std::tanh(v); },
               [](double, double y) { return 1.0 - y * y; });
}

Tensor Relu(Graph *g, const Tensor &x) {
  return Unary(g, x, [](double v) { return v > 0 ? v : 0.0; },
               [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

Tensor Softmax(Graph *g, const Tensor &x) {
  const std::size_t c = x.dims().back();
  const std::size_t rows = x.numel() / c;
  Tensor out(x.dims());
  for (std::size_t r = 0; r < rows; ++r) {
    const double *xp = x.ptr() + r * c;
    double *yp = out.ptr() + r * c;
    double mx = *std::max_element(xp, xp + c);
    double total = 0;
    for (std::size_t j = 0; j < c; ++j) {
      yp[j] = std::exp(xp[j] - mx);
      total += yp[j];
    }
    for (std::size_t j = 0; j < c; ++j) yp[j] /= total;
  }
  RecordOn(g, {x}, out, [x, out, rows, c]() mutable {
    auto gx = x.grad();
    auto gy = out.grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const double *yp = out.ptr() + r * c;
      double dot = 0;
      for (std::size_t j = 0; j < c; ++j) dot += gy[r * c + j] * yp[j];
      for (std::size_t j = 0; j < c; ++j) gx[r * c + j] += yp[j] * (gy[r * c + j] - dot);
    }
  });
  return out;
}

Tensor Activation(Graph *g, const Tensor &x, ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid:
      return Sigmoid(g, x);
    case ActivationKind::kTanh:
      return Tanh(g, x);
    case ActivationKind::kRelu:
      return Relu(g, x);
    case ActivationKind::kSoftmax:
      return Softmax(g, x);
  }
  throw ConfigError("unknown activation");
}

Tensor Sqrt(Graph *g, const Tensor &x) {
  for (double v : x.data()) {
    if (!(v > 0)) throw DataError("sqrt: non-positive input " + std::to_string(v));
  }
  return Unary(g, x, [](double v) { return std::sqrt(v); },
               [](double, double y) { return 0.5 / y; });
}

Tensor Sum(Graph *g, const Tensor &x) {
  double total = 0;
  for (double v : x.data()) total += v;
  Tensor out = Tensor::Scalar(total);
  RecordOn(g, {x}, out, [x, out]() mutable {
    double gy = out.grad()[0];
    for (auto &v : x.grad()) v += gy;
  });
  return out;
}

Tensor Reshape(Graph *g, const Tensor &x, Shape dims) {
  if (NumElements(dims) != x.numel()) {
    throw ShapeError("reshape: " + ShapeToString(x.dims()) + " -> " + ShapeToString(dims));
  }
  Tensor out(std::move(dims));
  std::copy(x.values().begin(), x.values().end(), out.values().begin());
  RecordOn(g, {x}, out, [x, out]() mutable {
    auto gx = x.grad();
    auto gy = out.grad();
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
  });
  return out;
}

Tensor Transpose(Graph *g, const Tensor &x) {
  RequireRank(x, 2, "transpose");
  const std::size_t r = x.dim(0), c = x.dim(1);
  Tensor out({c, r});
  MatMap(out.ptr(), c, r) = View(x, r, c).transpose();
  RecordOn(g, {x}, out, [x, out, r, c]() mutable {
    ViewGrad(x, r, c) += ViewOutGrad(out, c, r).transpose();
  });
  return out;
}

Tensor SwapAxes01(Graph *g, const Tensor &x) {
  RequireRank(x, 3, "swap_axes01");
  const std::size_t a = x.dim(0), b = x.dim(1), c = x.dim(2);
  Tensor out({b, a, c});
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      std::copy_n(x.ptr() + (i * b + j) * c, c, out.ptr() + (j * a + i) * c);
    }
  }
  RecordOn(g, {x}, out, [x, out, a, b, c]() mutable {
    auto gx = x.grad();
    auto gy = out.grad();
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t j = 0; j < b; ++j) {
        for (std::size_t k = 0; k < c; ++k) gx[(i * b + j) * c + k] += gy[(j * a + i) * c + k];
      }
    }
  });
  return out;
}

Tensor ConcatLast(Graph *g, const std::vector<Tensor> &parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Shape lead(parts[0].dims().begin(), parts[0].dims().end() - 1);
  std::size_t total = 0;
  std::vector<std::size_t> widths;
  for (const auto &p : parts) {
    Shape pl(p.dims().begin(), p.dims().end() - 1);
    if (pl != lead) {
      throw ShapeError("concat: leading dims differ " + ShapeToString(parts[0].dims()) + " vs " +
                       ShapeToString(p.dims()));
    }
    widths.push_back(p.dims().back());
    total += p.dims().back();
  }
  const std::size_t rows = NumElements(lead);
  Shape od = lead;
  od.push_back(total);
  Tensor out(od);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(parts[k].ptr() + r * widths[k], widths[k], out.ptr() + r * total + off);
    }
    off += widths[k];
  }
  RecordOn(g, parts, out, [parts, out, widths, rows, total]() mutable {
    auto gy = out.grad();
    std::size_t off = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].requires_grad()) {
        auto gp = parts[k].grad();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < widths[k]; ++j) gp[r * widths[k] + j] += gy[r * total + off + j];
        }
      }
      off += widths[k];
    }
  });
  return out;
}

Tensor ConcatRows(Graph *g, const std::vector<Tensor> &parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const std::size_t c = parts[0].dims().back();
  std::size_t rows = 0;
  for (const auto &p : parts) {
    RequireRank(p, 2, "concat_rows");
    if (p.dim(1) != c) throw ShapeError("concat_rows: column counts differ");
    rows += p.dim(0);
  }
  Tensor out({rows, c});
  std::size_t off = 0;
  for (const auto &p : parts) {
    std::copy_n(p.ptr(), p.numel(), out.ptr() + off);
    off += p.numel();
  }
  RecordOn(g, parts, out, [parts, out]() mutable {
    auto gy = out.grad();
    std::size_t off = 0;
    for (auto &p : parts) {
      if (p.requires_grad()) {
        auto gp = p.grad();
        for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += gy[off + i];
      }
      off += p.numel();
    }
  });
  return out;
}

Tensor BroadcastConcat(Graph *g, const Tensor &frames, const Tensor &reps) {
  RequireRank(frames, 2, "broadcast_concat");
  RequireRank(reps, 2, "broadcast_concat");
  const std::size_t t_len = frames.dim(0), c = frames.dim(1);
  const std::size_t n = reps.dim(0), r = reps.dim(1);
  const std::size_t w = c + r;
  Tensor out({t_len, n, w});
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double *dst = out.ptr() + (t * n + i) * w;
      std::copy_n(frames.ptr() + t * c, c, dst);
      std::copy_n(reps.ptr() + i * r, r, dst + c);
    }
  }
  RecordOn(g, {frames, reps}, out, [frames, reps, out, t_len, n, c, r, w]() mutable {
    auto gy = out.grad();
    if (frames.requires_grad()) {
      auto gf = frames.grad();
      for (std::size_t t = 0; t < t_len; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < c; ++j) gf[t * c + j] += gy[(t * n + i) * w + j];
        }
      }
    }
    if (reps.requires_grad()) {
      auto gr = reps.grad();
      for (std::size_t t = 0; t < t_len; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < r; ++j) gr[i * r + j] += gy[(t * n + i) * w + c + j];
        }
      }
    }
  });
  return out;
}

Tensor Conv1d(Graph *g, const Tensor &x, const Tensor &weight, const Tensor &bias,
              std::size_t width, std::size_t stride) {
  if (width % 2 == 0) {
    throw ConfigError("conv1d: kernel width must be odd, got " + std::to_string(width));
  }
  if (stride == 0) throw ConfigError("conv1d: stride must be >= 1");
  RequireRank(x, 2, "conv1d");
  RequireRank(weight, 2, "conv1d");
  RequireRank(bias, 1, "conv1d");
  const std::size_t t_in = x.dim(0), cin = x.dim(1), cout = weight.dim(1);
  if (weight.dim(0) != width * cin || bias.dim(0) != cout) {
    throw ShapeError("conv1d: weight " + ShapeToString(weight.dims()) + " / bias " +
                     ShapeToString(bias.dims()) + " do not fit input " + ShapeToString(x.dims()) +
                     " with width " + std::to_string(width));
  }
  const std::size_t pad = width / 2;
  const std::size_t t_out = (t_in - 1) / stride + 1;
  const std::size_t k = width * cin;
  // im2col: cols[t][w * cin + c] = x[t * stride + w - pad][c].
  auto cols = std::make_shared<RowMat>(RowMat::Zero(t_out, k));
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t w = 0; w < width; ++w) {
      const long src = static_cast<long>(t * stride + w) - static_cast<long>(pad);
      if (src < 0 || src >= static_cast<long>(t_in)) continue;
      std::copy_n(x.ptr() + src * cin, cin, cols->data() + t * k + w * cin);
    }
  }
  Tensor out({t_out, cout});
  MatMap y(out.ptr(), t_out, cout);
  y.noalias() = *cols * View(weight, k, cout);
  y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.ptr(), cout);
  RecordOn(g, {x, weight, bias}, out,
            [x, weight, bias, out, cols, t_in, cin, cout, t_out, k, width, stride, pad]() mutable {
              auto gy = ViewOutGrad(out, t_out, cout);
              if (weight.requires_grad()) {
                ViewGrad(weight, k, cout).noalias() += cols->transpose() * gy;
              }
              if (bias.requires_grad()) {
                Eigen::Map<Eigen::RowVectorXd>(bias.grad_ptr(), cout) += gy.colwise().sum();
              }
              if (x.requires_grad()) {
                RowMat dcols = gy * View(weight, k, cout).transpose();
                auto gx = x.grad();
                for (std::size_t t = 0; t < t_out; ++t) {
                  for (std::size_t w = 0; w < width; ++w) {
                    const long src = static_cast<long>(t * stride + w) - static_cast<long>(pad);
                    if (src < 0 || src >= static_cast<long>(t_in)) continue;
                    for (std::size_t c = 0; c < cin; ++c) {
                      gx[src * cin + c] += dcols(t, w * cin + c);
                    }
                  }
                }
              }
            });
  return out;
}

// Row count up to which recurrent products use coefficient-wise evaluation.
constexpr Eigen::Index kLazyRows = 8;

Tensor Lstm(Graph *g, const Tensor &x, const Tensor &w_ih, const Tensor &w_hh,
            const Tensor &bias, bool reverse) {
  RequireRank(x, 3, "lstm");
  RequireRank(w_ih, 2, "lstm");
  RequireRank(w_hh, 2, "lstm");
  RequireRank(bias, 1, "lstm");
  const std::size_t steps = x.dim(0), batch = x.dim(1), feat = x.dim(2);
  const std::size_t hid = w_hh.dim(0);
  const std::size_t g4 = 4 * hid;
  if (w_ih.dim(0) != feat || w_ih.dim(1) != g4 || w_hh.dim(1) != g4 || bias.dim(0) != g4) {
    throw ShapeError("lstm: weights w_ih " + ShapeToString(w_ih.dims()) + ", w_hh " +
                     ShapeToString(w_hh.dims()) + ", bias " + ShapeToString(bias.dims()) +
                     " do not fit input " + ShapeToString(x.dims()));
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(steps * batch);
  const Eigen::Index nb = static_cast<Eigen::Index>(batch);
  const Eigen::Index h = static_cast<Eigen::Index>(hid);
  // Saved for backward: post-activation gates [i f g o], cell states and
  // tanh of cell states, all indexed by (step, batch) row.
  struct Saved {
    RowMat gates, cells, tanh_cells;
  };
  auto saved = std::make_shared<Saved>();
  RowMat &a = saved->gates;
  a.noalias() = View(x, rows, feat) * View(w_ih, feat, g4);
  a.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.ptr(), g4);
  saved->cells.resize(rows, h);
  saved->tanh_cells.resize(rows, h);

  Tensor out({steps, batch, hid});
  MatMap h_all(out.ptr(), rows, h);
  auto whh = View(w_hh, hid, g4);
  for (std::size_t k = 0; k < steps; ++k) {
    const Eigen::Index t = static_cast<Eigen::Index>(reverse ? steps - 1 - k : k);
    const Eigen::Index tp = reverse ? t + 1 : t - 1;
    auto gates = a.middleRows(t * nb, nb);
    if (k > 0) {
      // Few rows per step: the blocked GEMM path costs more than it saves.
      if (nb <= kLazyRows) {
        gates.noalias() += h_all.middleRows(tp * nb, nb).lazyProduct(whh);
      } else {
        gates.noalias() += h_all.middleRows(tp * nb, nb) * whh;
      }
    }
    gates.leftCols(2 * h) = FastSigmoid(gates.leftCols(2 * h).array()).matrix();
    gates.rightCols(h) = FastSigmoid(gates.rightCols(h).array()).matrix();
    gates.middleCols(2 * h, h) = FastTanh(gates.middleCols(2 * h, h).array()).matrix();
    auto c = saved->cells.middleRows(t * nb, nb).array();
    auto ig = gates.leftCols(h).array();
    auto gg = gates.middleCols(2 * h, h).array();
    if (k > 0) {
      c = ig * gg + gates.middleCols(h, h).array() * saved->cells.middleRows(tp * nb, nb).array();
    } else {
      c = ig * gg;
    }
    auto tc = saved->tanh_cells.middleRows(t * nb, nb).array();
    tc = FastTanh(c);
    h_all.middleRows(t * nb, nb).array() = gates.rightCols(h).array() * tc;
  }

  RecordOn(g, {x, w_ih, w_hh, bias}, out,
            [x, w_ih, w_hh, bias, out, saved, steps, nb, feat, h, g4, rows, reverse]() mutable {
              const RowMat &a = saved->gates;
              auto dh_out = ViewOutGrad(out, rows, h);
              ConstMatMap h_all(out.ptr(), rows, h);
              auto whh = View(w_hh, h, g4);
              RowMat d_pre(rows, 4 * h);
              RowArr dh_next = RowArr::Zero(nb, h);
              RowArr dc_next = RowArr::Zero(nb, h);
              RowArr dh(nb, h), dc(nb, h);
              for (std::size_t kk = steps; kk-- > 0;) {
                const Eigen::Index t = static_cast<Eigen::Index>(reverse ? steps - 1 - kk : kk);
                const Eigen::Index tp = reverse ? t + 1 : t - 1;
                const bool has_prev = kk > 0;
                auto gates = a.middleRows(t * nb, nb);
                auto ig = gates.leftCols(h).array();
                auto fg = gates.middleCols(h, h).array();
                auto gg = gates.middleCols(2 * h, h).array();
                auto og = gates.rightCols(h).array();
                auto tc = saved->tanh_cells.middleRows(t * nb, nb).array();
                auto dgate = d_pre.middleRows(t * nb, nb);
                dh = dh_out.middleRows(t * nb, nb).array() + dh_next;
                dc = dh * og * (1.0 - tc * tc) + dc_next;
                dgate.leftCols(h).array() = dc * gg * ig * (1.0 - ig);
                if (has_prev) {
                  dgate.middleCols(h, h).array() =
                      dc * saved->cells.middleRows(tp * nb, nb).array() * fg * (1.0 - fg);
                } else {
                  dgate.middleCols(h, h).setZero();
                }
                dgate.middleCols(2 * h, h).array() = dc * ig * (1.0 - gg * gg);
                dgate.rightCols(h).array() = dh * tc * og * (1.0 - og);
                dc_next = dc * fg;
                if (has_prev) {
                  if (nb <= kLazyRows) {
                    dh_next.matrix().noalias() = dgate.lazyProduct(whh.transpose());
                  } else {
                    dh_next.matrix().noalias() = dgate * whh.transpose();
                  }
                }
              }
              if (w_hh.requires_grad() && steps > 1) {
                // Every step but the first pairs its gate gradient with the
                // previous step's output.
                const Eigen::Index n = static_cast<Eigen::Index>(steps - 1) * nb;
                if (reverse) {
                  ViewGrad(w_hh, h, g4).noalias() +=
                      h_all.bottomRows(n).transpose() * d_pre.topRows(n);
                } else {
                  ViewGrad(w_hh, h, g4).noalias() +=
                      h_all.topRows(n).transpose() * d_pre.bottomRows(n);
                }
              }
              if (w_ih.requires_grad()) {
                ViewGrad(w_ih, feat, g4).noalias() += View(x, rows, feat).transpose() * d_pre;
              }
              if (bias.requires_grad()) {
                Eigen::Map<Eigen::RowVectorXd>(bias.grad_ptr(), g4) += d_pre.colwise().sum();
              }
              if (x.requires_grad()) {
                ViewGrad(x, rows, feat).noalias() += d_pre * View(w_ih, feat, g4).transpose();
              }
            });
  return out;
}

Tensor TimeNorm(Graph *g, const Tensor &x, double eps) {
  RequireRank(x, 2, "time_norm");
  const std::size_t t_len = x.dim(0), c = x.dim(1);
  auto inv = std::make_shared<std::vector<double>>(c);
  Tensor out(x.dims());
  for (std::size_t j = 0; j < c; ++j) {
    double mean = 0;
    for (std::size_t t = 0; t < t_len; ++t) mean += x.ptr()[t * c + j];
    mean /= static_cast<double>(t_len);
    double var = 0;
    for (std::size_t t = 0; t < t_len; ++t) {
      const double d = x.ptr()[t * c + j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(t_len);
    (*inv)[j] = 1.0 / std::sqrt(var + eps);
    for (std::size_t t = 0; t < t_len; ++t) {
      out.ptr()[t * c + j] = (x.ptr()[t * c + j] - mean) * (*inv)[j];
    }
  }
  RecordOn(g, {x}, out, [x, out, inv, t_len, c]() mutable {
    auto gx = x.grad();
    auto gy = out.grad();
    const double *y = out.ptr();
    const double n = static_cast<double>(t_len);
    for (std::size_t j = 0; j < c; ++j) {
      double s1 = 0, s2 = 0;
      for (std::size_t t = 0; t < t_len; ++t) {
        s1 += gy[t * c + j];
        s2 += gy[t * c + j] * y[t * c + j];
      }
      for (std::size_t t = 0; t < t_len; ++t) {
        gx[t * c + j] += (*inv)[j] / n * (n * gy[t * c + j] - s1 - y[t * c + j] * s2);
      }
    }
  });
  return out;
}

Tensor BinaryCrossEntropy(Graph *g, const Tensor &p, const Tensor &labels, double clamp) {
  RequireSameDims(p, labels, "bce");
  double total = 0;
  for (std::size_t i = 0; i < p.numel(); ++i) {
    const double pc = std::clamp(p.ptr()[i], clamp, 1.0 - clamp);
    const double y = labels.ptr()[i];
    total -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
  }
  Tensor out = Tensor::Scalar(total);
  RecordOn(g, {p}, out, [p, labels, out, clamp]() mutable {
    const double gy = out.grad()[0];
    auto gp = p.grad();
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const double pv = p.ptr()[i];
      if (pv <= clamp || pv >= 1.0 - clamp) continue;
      const double y = labels.ptr()[i];
      gp[i] += gy * (-(y / pv) + (1.0 - y) / (1.0 - pv));
    }
  });
  return out;
}

}  // namespace mtead
