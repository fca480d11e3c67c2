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

#ifndef MTEAD_GRAPH_H_
#define MTEAD_GRAPH_H_

#include <cstddef>
#include <functional>
#include <vector>

#include "mtead/tensor.h"

namespace mtead {

// Reverse-mode tape for one forward pass.
//
// Ops append a node when recording is on and at least one input requires a
// gradient. Nodes are stored in creation order, which is a topological order
// because an op can only consume tensors that already exist. A graph and the
// tensors it records are confined to one thread.
class Graph {
 public:
  using BackwardFn = std::function<void()>;

  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph &) = delete;
  Graph &operator=(const Graph &) = delete;

  bool recording() const { return record_; }

  // Marks `output` as requiring grad and records `fn` if any input requires
  // grad. `fn` reads output.grad() and accumulates into the inputs.
  void Record(std::initializer_list<Tensor> inputs, Tensor output, BackwardFn fn);
  void Record(const std::vector<Tensor> &inputs, Tensor output, BackwardFn fn);

  // Propagates d(loss)/d(.) to every recorded tensor, then clears the tape.
  void Backward(const Tensor &loss);

  std::size_t size() const { return nodes_.size(); }
  void Clear() { nodes_.clear(); }

 private:
  struct Node {
    Tensor output;
    BackwardFn backward;
  };
  bool record_;
  std::vector<Node> nodes_;
};

inline void Backward(Graph *graph, const Tensor &loss) { graph->Backward(loss); }

}  // namespace mtead

#endif  // MTEAD_GRAPH_H_
