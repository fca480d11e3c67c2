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

#ifndef MTEAD_OPS_H_
#define MTEAD_OPS_H_

#include <cstddef>
#include <vector>

#include "mtead/graph.h"
#include "mtead/tensor.h"

// Differentiable ops. Every op computes its value eagerly and, when the graph
// is recording and an input requires grad, registers a backward rule. A null
// graph runs the op without recording.
namespace mtead {

// [M x K] * [K x N] -> [M x N].
Tensor MatMul(Graph *g, const Tensor &a, const Tensor &b);

// Elementwise ops; operands must have identical dims.
Tensor Add(Graph *g, const Tensor &a, const Tensor &b);
Tensor Sub(Graph *g, const Tensor &a, const Tensor &b);
Tensor Mul(Graph *g, const Tensor &a, const Tensor &b);
Tensor Scale(Graph *g, const Tensor &a, double s);

// x[..., C] + bias[C], broadcast over leading axes.
Tensor AddBias(Graph *g, const Tensor &x, const Tensor &bias);

enum class ActivationKind { kSigmoid, kTanh, kRelu, kSoftmax };

Tensor Sigmoid(Graph *g, const Tensor &x);
Tensor Tanh(Graph *g, const Tensor &x);
Tensor Relu(Graph *g, const Tensor &x);
// Softmax over the last axis, max-subtracted.
Tensor Softmax(Graph *g, const Tensor &x);
Tensor Activation(Graph *g, const Tensor &x, ActivationKind kind);

// Elementwise sqrt; inputs must be positive.
Tensor Sqrt(Graph *g, const Tensor &x);

// Sum of all elements -> [1].
Tensor Sum(Graph *g, const Tensor &x);

Tensor Reshape(Graph *g, const Tensor &x, Shape dims);
// 2-D transpose.
Tensor Transpose(Graph *g, const Tensor &x);
// [A x B x C] -> [B x A x C].
Tensor SwapAxes01(Graph *g, const Tensor &x);

// Concatenates along the last axis; leading dims must agree.
Tensor ConcatLast(Graph *g, const std::vector<Tensor> &parts);
// Concatenates 2-D tensors along rows; column counts must agree.
Tensor ConcatRows(Graph *g, const std::vector<Tensor> &parts);

// frames[T x C], reps[N x R] -> [T x N x (C + R)] with out[t][n] = frames[t] ++ reps[n].
Tensor BroadcastConcat(Graph *g, const Tensor &frames, const Tensor &reps);

// 1-D convolution over time with zero "same" padding.
// x[T x Cin], weight[(W * Cin) x Cout] laid out [W][Cin][Cout], bias[Cout].
// Output length is ceil(T / stride). Throws ConfigError for even W.
Tensor Conv1d(Graph *g, const Tensor &x, const Tensor &weight, const Tensor &bias,
              std::size_t width, std::size_t stride = 1);

// One LSTM layer over x[S x B x F] along axis 0, batch axis 1.
// w_ih[F x 4H], w_hh[H x 4H], bias[4H]; gate blocks ordered i, f, g, o.
// Zero initial state; `reverse` scans from the last step backwards.
Tensor Lstm(Graph *g, const Tensor &x, const Tensor &w_ih, const Tensor &w_hh,
            const Tensor &bias, bool reverse);

// Per-column normalization over rows: (x - mean) / sqrt(var + eps).
Tensor TimeNorm(Graph *g, const Tensor &x, double eps = 1e-5);

// -sum(y log p + (1 - y) log(1 - p)) with p clamped to [clamp, 1 - clamp].
Tensor BinaryCrossEntropy(Graph *g, const Tensor &p, const Tensor &labels,
                          double clamp = 1e-7);

}  // namespace mtead

#endif  // MTEAD_OPS_H_
