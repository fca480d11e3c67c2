// Test-only central finite-difference gradient checker.

#ifndef MTEAD_TESTS_GRADCHECK_H_
#define MTEAD_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mtead/graph.h"
#include "mtead/tensor.h"

namespace mtead::testing {

struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t worst_leaf = 0;
};

// Compares autodiff gradients of loss_fn w.r.t. every leaf with central
// differences. The error per leaf is ||a - n|| / max(||a||, ||n||, floor).
inline GradCheckResult CheckGradients(std::vector<Tensor> leaves,
                                      const std::function<Tensor(Graph *)> &loss_fn,
                                      double h = 1e-5, double floor = 1e-7) {
  for (auto &l : leaves) {
    l.set_requires_grad(true);
    l.drop_grad();
  }
  {
    Graph g;
    Tensor loss = loss_fn(&g);
    g.Backward(loss);
  }
  GradCheckResult res;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    Tensor leaf = leaves[li];
    std::vector<double> analytic(leaf.numel(), 0.0);
    if (leaf.has_grad()) {
      auto gr = leaf.grad();
      std::copy(gr.begin(), gr.end(), analytic.begin());
    }
    double diff2 = 0, a2 = 0, n2 = 0;
    for (std::size_t k = 0; k < leaf.numel(); ++k) {
      const double orig = leaf.data()[k];
      leaf.data()[k] = orig + h;
      Graph gp(false);
      const double fp = loss_fn(&gp).item();
      leaf.data()[k] = orig - h;
      Graph gm(false);
      const double fm = loss_fn(&gm).item();
      leaf.data()[k] = orig;
      const double num = (fp - fm) / (2 * h);
      diff2 += (num - analytic[k]) * (num - analytic[k]);
      a2 += analytic[k] * analytic[k];
      n2 += num * num;
    }
    const double denom = std::max({std::sqrt(a2), std::sqrt(n2), floor});
    const double rel = std::sqrt(diff2) / denom;
    if (rel > res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst_leaf = li;
    }
  }
  return res;
}

}  // namespace mtead::testing

#endif  // MTEAD_TESTS_GRADCHECK_H_
