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

#include "mtead/graph.h"

#include <utility>

#include "mtead/error.h"

namespace mtead {

void Graph::Record(std::initializer_list<Tensor> inputs, Tensor output, BackwardFn fn) {
  if (!record_) return;
  bool any = false;
  for (const auto &t : inputs) any = any || t.requires_grad();
  if (!any) return;
  output.set_requires_grad(true);
  nodes_.push_back({std::move(output), std::move(fn)});
}

void Graph::Record(const std::vector<Tensor> &inputs, Tensor output, BackwardFn fn) {
  if (!record_) return;
  bool any = false;
  for (const auto &t : inputs) any = any || t.requires_grad();
  if (!any) return;
  output.set_requires_grad(true);
  nodes_.push_back({std::move(output), std::move(fn)});
}

void Graph::Backward(const Tensor &loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ShapeError("backward needs a scalar loss, got " +
                     (loss.defined() ? ShapeToString(loss.dims()) : std::string("undefined")));
  }
  if (!loss.requires_grad()) {
    throw DataError("loss was not produced by a recorded graph");
  }
  Tensor l = loss;
  l.grad()[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!it->output.has_grad()) continue;
    it->backward();
    // Intermediate gradients are not needed once propagated.
    it->output.drop_grad();
  }
  nodes_.clear();
}

}  // namespace mtead
