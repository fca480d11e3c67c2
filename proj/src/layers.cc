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

#include "mtead/layers.h"

#include <cmath>

#include "mtead/error.h"
#include "mtead/ops.h"

namespace mtead {

Tensor ParameterSet::Create(const std::string &name, Shape dims) {
  Tensor t(std::move(dims), /*requires_grad=*/true);
  Insert(name, t);
  return t;
}

void ParameterSet::Insert(const std::string &name, Tensor t) {
  if (Contains(name)) throw ConfigError("duplicate parameter name: " + name);
  items_.emplace_back(name, std::move(t));
}

bool ParameterSet::Contains(const std::string &name) const {
  for (const auto &it : items_) {
    if (it.first == name) return true;
  }
  return false;
}

Tensor ParameterSet::Get(const std::string &name) const {
  for (const auto &it : items_) {
    if (it.first == name) return it.second;
  }
  throw ConfigError("no parameter named " + name);
}

std::size_t ParameterSet::NumScalars() const {
  std::size_t n = 0;
  for (const auto &it : items_) n += it.second.numel();
  return n;
}

void ParameterSet::ZeroGrad() {
  for (auto &it : items_) it.second.zero_grad();
}

void ParameterSet::Append(const ParameterSet &other) {
  for (const auto &it : other.items_) Insert(it.first, it.second);
}

void InitFanIn(Tensor *t, std::size_t fan_in, Rng *rng) {
  const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
  FillUniform(t, -a, a, rng);
}

Linear Linear::Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                      std::size_t out, Rng *rng) {
  Linear l;
  l.weight = params->Create(prefix + ".weight", {in, out});
  l.bias = params->Create(prefix + ".bias", {out});
  InitFanIn(&l.weight, in, rng);
  return l;
}

Tensor Linear::Forward(Graph *g, const Tensor &x) const {
  const std::size_t in = weight.dim(0);
  if (x.dims().back() != in) {
    throw ShapeError("linear: input " + ShapeToString(x.dims()) + " vs weight " +
                     ShapeToString(weight.dims()));
  }
  if (x.rank() == 2) return AddBias(g, MatMul(g, x, weight), bias);
  Shape out_dims = x.dims();
  out_dims.back() = weight.dim(1);
  Tensor flat = Reshape(g, x, {x.numel() / in, in});
  return Reshape(g, AddBias(g, MatMul(g, flat, weight), bias), out_dims);
}

Conv1dLayer Conv1dLayer::Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                                std::size_t out, std::size_t width, std::size_t stride,
                                Rng *rng) {
  if (width % 2 == 0) {
    throw ConfigError("conv1d: kernel width must be odd, got " + std::to_string(width));
  }
  Conv1dLayer c;
  c.width = width;
  c.stride = stride;
  c.weight = params->Create(prefix + ".weight", {width * in, out});
  c.bias = params->Create(prefix + ".bias", {out});
  InitFanIn(&c.weight, width * in, rng);
  return c;
}

Tensor Conv1dLayer::Forward(Graph *g, const Tensor &x) const {
  return Conv1d(g, x, weight, bias, width, stride);
}

LstmLayer LstmLayer::Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                            std::size_t hidden, Rng *rng) {
  LstmLayer l;
  l.w_ih = params->Create(prefix + ".w_ih", {in, 4 * hidden});
  l.w_hh = params->Create(prefix + ".w_hh", {hidden, 4 * hidden});
  l.bias = params->Create(prefix + ".bias", {4 * hidden});
  // The gate pre-activation sees [x, h], so fan-in is in + hidden.
  InitFanIn(&l.w_ih, in + hidden, rng);
  InitFanIn(&l.w_hh, in + hidden, rng);
  return l;
}

BiLstm BiLstm::Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                      std::size_t hidden, std::size_t num_layers, Rng *rng) {
  if (num_layers == 0) throw ConfigError("bilstm: need at least one layer");
  BiLstm b;
  std::size_t width = in;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string p = prefix + ".l" + std::to_string(l);
    auto fwd = LstmLayer::Create(params, p + ".fwd", width, hidden, rng);
    auto bwd = LstmLayer::Create(params, p + ".bwd", width, hidden, rng);
    b.layers.emplace_back(std::move(fwd), std::move(bwd));
    width = 2 * hidden;
  }
  return b;
}

Tensor BiLstm::Forward(Graph *g, const Tensor &x) const {
  if (x.rank() != 3) throw ShapeError("bilstm: expected [S x B x F], got " + ShapeToString(x.dims()));
  Tensor h = x;
  for (const auto &[fwd, bwd] : layers) {
    Tensor f = Lstm(g, h, fwd.w_ih, fwd.w_hh, fwd.bias, /*reverse=*/false);
    Tensor r = Lstm(g, h, bwd.w_ih, bwd.w_hh, bwd.bias, /*reverse=*/true);
    h = ConcatLast(g, {f, r});
  }
  return h;
}

Tensor BiLstm::ForwardSequence(Graph *g, const std::vector<Tensor> &frames) const {
  if (frames.empty()) throw DataError("bilstm: empty input sequence");
  const std::size_t f = frames[0].numel();
  std::vector<Tensor> rows;
  rows.reserve(frames.size());
  for (const auto &fr : frames) {
    if (fr.numel() != f) throw ShapeError("bilstm: frames differ in width");
    rows.push_back(Reshape(g, fr, {1, f}));
  }
  Tensor seq = Reshape(g, ConcatRows(g, rows), {frames.size(), 1, f});
  Tensor out = Forward(g, seq);
  return Reshape(g, out, {frames.size(), out.dim(2)});
}

}  // namespace mtead
