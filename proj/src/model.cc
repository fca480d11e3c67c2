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

#include "mtead/model.h"

#include <cmath>

#include "mtead/error.h"

namespace mtead {
namespace {

std::size_t AsSize(double v, const std::string &name) {
  if (!(v >= 0) || v != std::floor(v) || v > 1e12) {
    throw FormatError("checkpoint: " + name + " is not a valid size");
  }
  return static_cast<std::size_t>(v);
}

void CopyInto(const Tensor &src, Tensor dst, const std::string &name) {
  if (src.dims() != dst.dims()) {
    throw ShapeError("checkpoint: dimension mismatch for " + name + ": stored " +
                     ShapeToString(src.dims()) + ", model expects " + ShapeToString(dst.dims()));
  }
  std::copy(src.data().begin(), src.data().end(), dst.data().begin());
}

}  // namespace

std::string RepModeName(RepMode mode) { return mode == RepMode::kZvector ? "zvector" : "external"; }

RepMode ParseRepMode(const std::string &name) {
  if (name == "zvector") return RepMode::kZvector;
  if (name == "external") return RepMode::kExternal;
  throw ConfigError("unknown representation mode '" + name + "' (expected zvector or external)");
}

Model::Model(const ModelConfig &config) : config_(config) {
  if (config.detector.rep_dim != kRepDim) {
    throw ConfigError("detector rep_dim must be " + std::to_string(kRepDim));
  }
  if (config.detector.feat_dim != config.extractor.input_dim) {
    throw ConfigError("detector and extractor must read the same feature dimension");
  }
  Rng rng(config.seed);
  extractor_ = ZExtractor::Create(&extractor_params_, "extractor", config.extractor, &rng);
  detector_ = Detector::Create(&detector_params_, "detector", config.detector, &rng);
}

ParameterSet Model::TrainableParams() const {
  ParameterSet out;
  if (config_.rep_mode == RepMode::kZvector) out.Append(extractor_params_);
  out.Append(detector_params_);
  return out;
}

TensorList ModelToTensors(const Model &model, const OptimizerState *optim, const TensorList *extra) {
  const auto &c = model.config();
  TensorList t;
  const auto &e = c.extractor;
  std::vector<double> channels(e.channels.begin(), e.channels.end());
  t.AddScalar("config/extractor.input_dim", static_cast<double>(e.input_dim));
  t.AddVector("config/extractor.channels", channels);
  t.AddScalar("config/extractor.kernel", static_cast<double>(e.kernel));
  t.AddScalar("config/extractor.attention_dim", static_cast<double>(e.attention_dim));
  t.AddScalar("config/extractor.fit_frames", static_cast<double>(e.fit_frames));
  const auto &d = c.detector;
  t.AddScalar("config/detector.feat_dim", static_cast<double>(d.feat_dim));
  t.AddScalar("config/detector.cnn_layers", static_cast<double>(d.cnn_layers));
  t.AddScalar("config/detector.cnn_channels", static_cast<double>(d.cnn_channels));
  t.AddScalar("config/detector.cnn_kernel", static_cast<double>(d.cnn_kernel));
  t.AddScalar("config/detector.cnn_stride", static_cast<double>(d.cnn_stride));
  t.AddScalar("config/detector.rep_dim", static_cast<double>(d.rep_dim));
  t.AddScalar("config/detector.model_dim", static_cast<double>(d.model_dim));
  t.AddScalar("config/detector.hidden", static_cast<double>(d.hidden));
  t.AddScalar("config/detector.mixer_layers", static_cast<double>(d.mixer_layers));
  t.AddScalar("config/detector.num_blocks", static_cast<double>(d.num_blocks));
  t.AddScalar("config/detector.chunk_frames", static_cast<double>(d.chunk_frames));
  t.AddScalar("config/rep_mode", c.rep_mode == RepMode::kZvector ? 0.0 : 1.0);
  t.AddScalar("config/ahc_threshold", c.ahc_threshold);
  // Seeds are 64-bit; store two 32-bit halves so f64 keeps them exact.
  t.AddVector("config/seed", {static_cast<double>(c.seed >> 32), static_cast<double>(c.seed & 0xffffffffu)});
  for (const auto *ps : {&model.extractor_params(), &model.detector_params()}) {
    for (const auto &[name, p] : ps->items()) t.Add("param/" + name, p.Clone());
  }
  if (optim != nullptr) {
    t.AddScalar("optim/step", static_cast<double>(optim->step));
    for (std::size_t i = 0; i < optim->names.size(); ++i) {
      t.Add("adam.m/" + optim->names[i], optim->first_moment[i].Clone());
      t.Add("adam.v/" + optim->names[i], optim->second_moment[i].Clone());
    }
  }
  if (extra != nullptr) {
    for (const auto &[name, v] : extra->items()) t.Add(name, v.Clone());
  }
  return t;
}

ModelConfig ConfigFromTensors(const TensorList &t) {
  ModelConfig c;
  auto size = [&](const std::string &name) { return AsSize(t.GetScalar(name), name); };
  c.extractor.input_dim = size("config/extractor.input_dim");
  c.extractor.channels.clear();
  for (double v : t.GetVector("config/extractor.channels")) {
    c.extractor.channels.push_back(AsSize(v, "config/extractor.channels"));
  }
  c.extractor.kernel = size("config/extractor.kernel");
  c.extractor.attention_dim = size("config/extractor.attention_dim");
  c.extractor.fit_frames = size("config/extractor.fit_frames");
  c.detector.feat_dim = size("config/detector.feat_dim");
  c.detector.cnn_layers = size("config/detector.cnn_layers");
  c.detector.cnn_channels = size("config/detector.cnn_channels");
  c.detector.cnn_kernel = size("config/detector.cnn_kernel");
  c.detector.cnn_stride = size("config/detector.cnn_stride");
  c.detector.rep_dim = size("config/detector.rep_dim");
  c.detector.model_dim = size("config/detector.model_dim");
  c.detector.hidden = size("config/detector.hidden");
  c.detector.mixer_layers = size("config/detector.mixer_layers");
  c.detector.num_blocks = size("config/detector.num_blocks");
  c.detector.chunk_frames = size("config/detector.chunk_frames");
  c.rep_mode = t.GetScalar("config/rep_mode") == 0.0 ? RepMode::kZvector : RepMode::kExternal;
  c.ahc_threshold = t.GetScalar("config/ahc_threshold");
  const auto seed = t.GetVector("config/seed");
  if (seed.size() != 2) throw FormatError("checkpoint: config/seed must hold two halves");
  c.seed = (static_cast<std::uint64_t>(AsSize(seed[0], "seed")) << 32) |
           static_cast<std::uint64_t>(AsSize(seed[1], "seed"));
  return c;
}

Model ModelFromTensors(const TensorList &tensors) {
  Model m(ConfigFromTensors(tensors));
  for (auto *ps : {&m.extractor_params(), &m.detector_params()}) {
    for (const auto &[name, p] : ps->items()) CopyInto(tensors.Get("param/" + name), p, name);
  }
  return m;
}

OptimizerState OptimizerFromTensors(const TensorList &tensors, const ParameterSet &params,
                                    AdamOptions adam, NoamOptions noam) {
  auto s = OptimizerState::ForParameters(params, adam, noam);
  if (!tensors.Contains("optim/step")) return s;
  s.step = static_cast<std::int64_t>(AsSize(tensors.GetScalar("optim/step"), "optim/step"));
  for (std::size_t i = 0; i < s.names.size(); ++i) {
    CopyInto(tensors.Get("adam.m/" + s.names[i]), s.first_moment[i], "adam.m/" + s.names[i]);
    CopyInto(tensors.Get("adam.v/" + s.names[i]), s.second_moment[i], "adam.v/" + s.names[i]);
  }
  return s;
}

void SaveModel(const std::string &path, const Model &model, const OptimizerState *optim,
               const TensorList *extra) {
  WriteCheckpoint(path, ModelToTensors(model, optim, extra));
}

Model LoadModel(const std::string &path) { return ModelFromTensors(ReadCheckpoint(path)); }

}  // namespace mtead
