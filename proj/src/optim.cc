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

#include "mtead/optim.h"

#include <algorithm>
#include <cmath>

#include "mtead/error.h"

namespace mtead {

OptimizerState OptimizerState::ForParameters(const ParameterSet &params, AdamOptions adam,
                                             NoamOptions noam) {
  OptimizerState s;
  s.adam = adam;
  s.noam = noam;
  for (const auto &[name, t] : params.items()) {
    s.names.push_back(name);
    s.first_moment.emplace_back(t.dims());
    s.second_moment.emplace_back(t.dims());
  }
  return s;
}

double NoamLr(std::int64_t step, double factor, std::size_t model_dim, std::size_t warmup) {
  if (step < 1) throw ConfigError("noam: step must be >= 1");
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup);
  return factor / std::sqrt(static_cast<double>(model_dim)) *
         std::min(1.0 / std::sqrt(s), s / (w * std::sqrt(w)));
}

void AdamStep(OptimizerState *state, ParameterSet *params, double lr) {
  const auto &items = params->items();
  if (items.size() != state->names.size()) {
    throw ShapeError("adam: optimizer state tracks " + std::to_string(state->names.size()) +
                     " parameters, got " + std::to_string(items.size()));
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto &[name, t] = items[i];
    if (name != state->names[i] || t.dims() != state->first_moment[i].dims()) {
      throw ShapeError("adam: parameter " + name + " does not match optimizer slot " +
                       state->names[i]);
    }
    if (t.has_grad() && !AllFinite(t.grad())) {
      throw DataError("adam: non-finite gradient in parameter " + name);
    }
  }
  state->step += 1;
  const auto &o = state->adam;
  const double bc1 = 1.0 - std::pow(o.beta1, static_cast<double>(state->step));
  const double bc2 = 1.0 - std::pow(o.beta2, static_cast<double>(state->step));
  for (std::size_t i = 0; i < items.size(); ++i) {
    Tensor p = items[i].second;
    double *m = state->first_moment[i].ptr();
    double *v = state->second_moment[i].ptr();
    double *w = p.ptr();
    const bool has = p.has_grad();
    const double *g = has ? p.grad().data() : nullptr;
    for (std::size_t k = 0; k < p.numel(); ++k) {
      const double gk = has ? g[k] : 0.0;
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * gk;
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * gk * gk;
      const double mh = m[k] / bc1;
      const double vh = v[k] / bc2;
      w[k] -= lr * mh / (std::sqrt(vh) + o.eps);
    }
  }
}

}  // namespace mtead
