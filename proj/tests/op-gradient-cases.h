// Randomized finite-difference cases, one per differentiable op.

#ifndef MTEAD_TESTS_OP_GRADIENT_CASES_H_
#define MTEAD_TESTS_OP_GRADIENT_CASES_H_

#include <functional>
#include <string>
#include <vector>

#include "mtead/ops.h"
#include "mtead/tensor.h"

namespace mtead::testing {

struct GradCase {
  std::string name;
  std::vector<Tensor> leaves;
  std::function<Tensor(Graph *)> loss;
};

inline Tensor RandomTensor(Shape dims, Rng *rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(dims));
  FillUniform(&t, lo, hi, rng);
  return t;
}

// A weighted sum makes every output element matter with a distinct weight.
inline Tensor WeightedSum(Graph *g, const Tensor &y, const Tensor &w) {
  return Sum(g, Mul(g, y, w));
}

inline std::vector<GradCase> OpGradientCases(unsigned seed) {
  Rng rng(seed);
  std::vector<GradCase> cases;
  auto add = [&](std::string name, std::vector<Tensor> leaves, Shape out_dims,
                 std::function<Tensor(Graph *)> fwd) {
    Tensor w = RandomTensor(out_dims, &rng);
    cases.push_back({std::move(name), std::move(leaves),
                     [fwd, w](Graph *g) { return WeightedSum(g, fwd(g), w); }});
  };

  {
    Tensor a = RandomTensor({3, 4}, &rng), b = RandomTensor({4, 2}, &rng);
    add("matmul", {a, b}, {3, 2}, [a, b](Graph *g) { return MatMul(g, a, b); });
  }
  {
    Tensor a = RandomTensor({2, 3}, &rng), b = RandomTensor({2, 3}, &rng);
    add("add", {a, b}, {2, 3}, [a, b](Graph *g) { return Add(g, a, b); });
    add("sub", {a, b}, {2, 3}, [a, b](Graph *g) { return Sub(g, a, b); });
    add("mul", {a, b}, {2, 3}, [a, b](Graph *g) { return Mul(g, a, b); });
    add("mul_self", {a}, {2, 3}, [a](Graph *g) { return Mul(g, a, a); });
    add("scale", {a}, {2, 3}, [a](Graph *g) { return Scale(g, a, -1.7); });
  }
  {
    Tensor x = RandomTensor({2, 3, 4}, &rng), b = RandomTensor({4}, &rng);
    add("add_bias", {x, b}, {2, 3, 4}, [x, b](Graph *g) { return AddBias(g, x, b); });
  }
  {
    Tensor x = RandomTensor({3, 5}, &rng, -3, 3);
    add("sigmoid", {x}, {3, 5}, [x](Graph *g) { return Sigmoid(g, x); });
    add("tanh", {x}, {3, 5}, [x](Graph *g) { return Tanh(g, x); });
    add("relu", {x}, {3, 5}, [x](Graph *g) { return Relu(g, x); });
    add("softmax", {x}, {3, 5}, [x](Graph *g) { return Softmax(g, x); });
  }
  {
    Tensor x = RandomTensor({2, 4}, &rng, 0.2, 2.0);
    add("sqrt", {x}, {2, 4}, [x](Graph *g) { return Sqrt(g, x); });
  }
  {
    Tensor x = RandomTensor({3, 4}, &rng);
    cases.push_back({"sum", {x}, [x](Graph *g) { return Sum(g, Mul(g, x, x)); }});
    add("reshape", {x}, {4, 3}, [x](Graph *g) { return Reshape(g, x, {4, 3}); });
    add("transpose", {x}, {4, 3}, [x](Graph *g) { return Transpose(g, x); });
  }
  {
    Tensor x = RandomTensor({2, 3, 4}, &rng);
    add("swap_axes01", {x}, {3, 2, 4}, [x](Graph *g) { return SwapAxes01(g, x); });
  }
  {
    Tensor a = RandomTensor({2, 3, 2}, &rng), b = RandomTensor({2, 3, 3}, &rng);
    add("concat_last", {a, b}, {2, 3, 5}, [a, b](Graph *g) { return ConcatLast(g, {a, b}); });
  }
  {
    Tensor a = RandomTensor({1, 3}, &rng), b = RandomTensor({2, 3}, &rng);
    add("concat_rows", {a, b}, {3, 3}, [a, b](Graph *g) { return ConcatRows(g, {a, b}); });
  }
  {
    Tensor f = RandomTensor({4, 3}, &rng), r = RandomTensor({2, 2}, &rng);
    add("broadcast_concat", {f, r}, {4, 2, 5},
        [f, r](Graph *g) { return BroadcastConcat(g, f, r); });
  }
  {
    Tensor x = RandomTensor({7, 2}, &rng), w = RandomTensor({3 * 2, 3}, &rng),
           b = RandomTensor({3}, &rng);
    add("conv1d", {x, w, b}, {7, 3}, [x, w, b](Graph *g) { return Conv1d(g, x, w, b, 3, 1); });
    Tensor w5 = RandomTensor({5 * 2, 3}, &rng);
    add("conv1d_stride2", {x, w5, b}, {4, 3},
        [x, w5, b](Graph *g) { return Conv1d(g, x, w5, b, 5, 2); });
  }
  {
    const std::size_t hid = 3;
    Tensor x = RandomTensor({5, 2, 4}, &rng), wi = RandomTensor({4, 4 * hid}, &rng),
           wh = RandomTensor({hid, 4 * hid}, &rng), b = RandomTensor({4 * hid}, &rng);
    add("lstm", {x, wi, wh, b}, {5, 2, hid},
        [x, wi, wh, b](Graph *g) { return Lstm(g, x, wi, wh, b, false); });
    add("lstm_reverse", {x, wi, wh, b}, {5, 2, hid},
        [x, wi, wh, b](Graph *g) { return Lstm(g, x, wi, wh, b, true); });
  }
  {
    Tensor x = RandomTensor({6, 3}, &rng);
    add("time_norm", {x}, {6, 3}, [x](Graph *g) { return TimeNorm(g, x); });
  }
  {
    Tensor p = RandomTensor({3, 2}, &rng, 0.05, 0.95);
    Tensor y({3, 2}, {1, 0, 0, 1, 1, 1});
    cases.push_back({"bce", {p}, [p, y](Graph *g) { return BinaryCrossEntropy(g, p, y); }});
  }
  return cases;
}

}  // namespace mtead::testing

#endif  // MTEAD_TESTS_OP_GRADIENT_CASES_H_
