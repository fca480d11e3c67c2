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

#ifndef MTEAD_OPTIM_H_
#define MTEAD_OPTIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mtead/layers.h"

namespace mtead {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct NoamOptions {
  double factor = 0.1;
  std::size_t model_dim = 64;
  std::size_t warmup_steps = 1000;
};

// Adam moments for one parameter list. `step` counts completed updates.
struct OptimizerState {
  AdamOptions adam;
  NoamOptions noam;
  std::int64_t step = 0;
  std::vector<std::string> names;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;

  // Allocates zero moments shaped like every entry of `params`.
  static OptimizerState ForParameters(const ParameterSet &params, AdamOptions adam = {},
                                      NoamOptions noam = {});
};

// lr = factor * model_dim^-0.5 * min(step^-0.5, step * warmup^-1.5).
double NoamLr(std::int64_t step, double factor, std::size_t model_dim, std::size_t warmup);

// One bias-corrected Adam update in place. Parameters without an allocated
// gradient are treated as having zero gradient. Throws DataError naming the
// parameter if any gradient is NaN or infinite; no parameter is modified then.
void AdamStep(OptimizerState *state, ParameterSet *params, double lr);

}  // namespace mtead

#endif  // MTEAD_OPTIM_H_
