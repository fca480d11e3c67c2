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

#ifndef MTEAD_MODEL_H_
#define MTEAD_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>

#include "mtead/checkpoint.h"
#include "mtead/detector.h"
#include "mtead/embeddings.h"
#include "mtead/optim.h"

namespace mtead {

// Where the detector's speaker representations come from.
enum class RepMode {
  kZvector,   // jointly trained extractor
  kExternal,  // frozen extractor, window-averaged and L2-normalized
};

std::string RepModeName(RepMode mode);
RepMode ParseRepMode(const std::string &name);

struct ModelConfig {
  ExtractorConfig extractor;
  DetectorConfig detector;
  RepMode rep_mode = RepMode::kZvector;
  double ahc_threshold = 0.5;
  std::uint64_t seed = 0;
};

// Extractor plus detector with their parameters. Layers hold handles into
// the parameter sets, so a Model is movable but not copyable.
class Model {
 public:
  explicit Model(const ModelConfig &config);
  Model(Model &&) = default;
  Model &operator=(Model &&) = default;
  Model(const Model &) = delete;
  Model &operator=(const Model &) = delete;

  const ModelConfig &config() const { return config_; }
  ModelConfig &mutable_config() { return config_; }
  const ZExtractor &extractor() const { return extractor_; }
  const Detector &detector() const { return detector_; }
  ParameterSet &extractor_params() { return extractor_params_; }
  ParameterSet &detector_params() { return detector_params_; }
  const ParameterSet &extractor_params() const { return extractor_params_; }
  const ParameterSet &detector_params() const { return detector_params_; }
  // Parameters the optimizer updates for this rep mode.
  ParameterSet TrainableParams() const;

 private:
  ModelConfig config_;
  ParameterSet extractor_params_;
  ParameterSet detector_params_;
  ZExtractor extractor_;
  Detector detector_;
};

// Checkpoint layout: "config/..." scalars and vectors, "param/<name>" for
// every parameter, and when given "optim/step", "adam.m/<name>",
// "adam.v/<name>" plus "train/..." entries from `extra`.
TensorList ModelToTensors(const Model &model, const OptimizerState *optim = nullptr,
                          const TensorList *extra = nullptr);
ModelConfig ConfigFromTensors(const TensorList &tensors);
// Rebuilds the model; ShapeError when a stored parameter's dims disagree
// with the architecture described by the stored config.
Model ModelFromTensors(const TensorList &tensors);
// Restores Adam state for `params`; nullopt-like empty state when absent.
OptimizerState OptimizerFromTensors(const TensorList &tensors, const ParameterSet &params,
                                    AdamOptions adam, NoamOptions noam);

void SaveModel(const std::string &path, const Model &model, const OptimizerState *optim = nullptr,
               const TensorList *extra = nullptr);
Model LoadModel(const std::string &path);

}  // namespace mtead

#endif  // MTEAD_MODEL_H_
