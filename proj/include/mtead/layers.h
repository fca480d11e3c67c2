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

#ifndef MTEAD_LAYERS_H_
#define MTEAD_LAYERS_H_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mtead/graph.h"
#include "mtead/tensor.h"

namespace mtead {

// Ordered collection of named trainable leaves. Names are unique; the order
// of insertion is the serialization order.
class ParameterSet {
 public:
  using Item = std::pair<std::string, Tensor>;

  // Creates a zero-filled leaf with requires_grad set.
  Tensor Create(const std::string &name, Shape dims);
  void Insert(const std::string &name, Tensor t);

  bool Contains(const std::string &name) const;
  Tensor Get(const std::string &name) const;

  const std::vector<Item> &items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t NumScalars() const;

  void ZeroGrad();
  void Append(const ParameterSet &other);

 private:
  std::vector<Item> items_;
};

// y = x W + b over the last axis of x.
struct Linear {
  Tensor weight;  // [in x out]
  Tensor bias;    // [out]

  static Linear Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                       std::size_t out, Rng *rng);
  Tensor Forward(Graph *g, const Tensor &x) const;
};

struct Conv1dLayer {
  Tensor weight;  // [(width * in) x out]
  Tensor bias;    // [out]
  std::size_t width = 1;
  std::size_t stride = 1;

  static Conv1dLayer Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                            std::size_t out, std::size_t width, std::size_t stride, Rng *rng);
  Tensor Forward(Graph *g, const Tensor &x) const;
};

struct LstmLayer {
  Tensor w_ih;  // [in x 4H]
  Tensor w_hh;  // [H x 4H]
  Tensor bias;  // [4H]

  static LstmLayer Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                          std::size_t hidden, Rng *rng);
  std::size_t hidden() const { return w_hh.dim(0); }
};

// Stacked bidirectional LSTM over x[S x B x F]; output [S x B x 2H] with the
// forward direction in the first H channels.
struct BiLstm {
  std::vector<std::pair<LstmLayer, LstmLayer>> layers;

  static BiLstm Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                       std::size_t hidden, std::size_t num_layers, Rng *rng);
  Tensor Forward(Graph *g, const Tensor &x) const;
  // Single-sequence convenience: frames are [F] or [1 x F] tensors, output is
  // [S x 2H]. Throws DataError on an empty sequence.
  Tensor ForwardSequence(Graph *g, const std::vector<Tensor> &frames) const;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
void InitFanIn(Tensor *t, std::size_t fan_in, Rng *rng);

}  // namespace mtead

#endif  // MTEAD_LAYERS_H_
