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

#ifndef MTEAD_CONFIG_H_
#define MTEAD_CONFIG_H_

#include <string>

#include "mtead/trainer.h"

namespace mtead {

// Training configuration as a JSON object mirroring TrainConfig:
//
//   {"mode": "zvector", "batch_size": 8, "noam_factor": 0.1, "warmup": 1000,
//    "max_steps": 2000, "chunk_frames": 500, "rep_source_global_ratio": 0,
//    "global_enroll_s": 5, "checkpoint_every": 0, "seed": 0,
//    "extractor": {"channels": [16, 32, 64, 128], "kernel": 3,
//                  "attention_dim": 64, "fit_frames": 500},
//    "detector": {"cnn_layers": 4, "cnn_channels": 32, "cnn_kernel": 5,
//                 "cnn_stride": 1, "model_dim": 64, "hidden": 64,
//                 "mixer_layers": 2, "num_blocks": 3, "chunk_frames": 500}}
//
// Every key is optional; absent keys keep their defaults. Unknown keys,
// wrong types and out-of-range values throw ConfigError.
TrainConfig ParseTrainConfig(const std::string &text);
TrainConfig ReadTrainConfig(const std::string &path);
std::string TrainConfigToJson(const TrainConfig &config);

}  // namespace mtead

#endif  // MTEAD_CONFIG_H_
