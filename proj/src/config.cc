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

#include "mtead/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtead/error.h"

namespace mtead {

namespace {

using Json = nlohmann::json;

void RejectUnknownKeys(const Json &obj, const std::set<std::string> &known,
                       const std::string &where) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto &[key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown key '" + where + key + "'");
  }
}

void ReadSize(const Json &obj, const std::string &key, const std::string &where,
              std::size_t *out) {
  if (!obj.contains(key)) return;
  const Json &v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config: '" + where + key + "' must be a non-negative integer");
  }
  *out = v.get<std::size_t>();
}

void ReadDouble(const Json &obj, const std::string &key, const std::string &where, double *out) {
  if (!obj.contains(key)) return;
  const Json &v = obj.at(key);
  if (!v.is_number()) throw ConfigError("config: '" + where + key + "' must be a number");
  *out = v.get<double>();
}

void ReadExtractor(const Json &obj, ExtractorConfig *c) {
  const std::string w = "extractor.";
  RejectUnknownKeys(obj, {"channels", "kernel", "attention_dim", "fit_frames"}, w);
  if (obj.contains("channels")) {
    const Json &ch = obj.at("channels");
    if (!ch.is_array() || ch.empty()) {
      throw ConfigError("config: 'extractor.channels' must be a non-empty array");
    }
    c->channels.clear();
    for (const auto &v : ch) {
      if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ConfigError("config: 'extractor.channels' entries must be positive integers");
      }
      c->channels.push_back(v.get<std::size_t>());
    }
  }
  ReadSize(obj, "kernel", w, &c->kernel);
  ReadSize(obj, "attention_dim", w, &c->attention_dim);
  ReadSize(obj, "fit_frames", w, &c->fit_frames);
}

void ReadDetector(const Json &obj, DetectorConfig *c) {
  const std::string w = "detector.";
  RejectUnknownKeys(obj,
                    {"cnn_layers", "cnn_channels", "cnn_kernel", "cnn_stride", "model_dim", "hidden",
                     "mixer_layers", "num_blocks", "chunk_frames"},
                    w);
  ReadSize(obj, "cnn_layers", w, &c->cnn_layers);
  ReadSize(obj, "cnn_channels", w, &c->cnn_channels);
  ReadSize(obj, "cnn_kernel", w, &c->cnn_kernel);
  ReadSize(obj, "cnn_stride", w, &c->cnn_stride);
  ReadSize(obj, "model_dim", w, &c->model_dim);
  ReadSize(obj, "hidden", w, &c->hidden);
  ReadSize(obj, "mixer_layers", w, &c->mixer_layers);
  ReadSize(obj, "num_blocks", w, &c->num_blocks);
  ReadSize(obj, "chunk_frames", w, &c->chunk_frames);
}

void CheckPositive(std::size_t v, const std::string &name) {
  if (v == 0) throw ConfigError("config: '" + name + "' must be positive");
}

}  // namespace

TrainConfig ParseTrainConfig(const std::string &text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  RejectUnknownKeys(root,
                    {"mode", "batch_size", "noam_factor", "warmup", "max_steps", "chunk_frames",
                     "rep_source_global_ratio", "global_enroll_s", "checkpoint_every", "seed",
                     "extractor", "detector"},
                    "");
  TrainConfig c;
  if (root.contains("mode")) {
    if (!root.at("mode").is_string()) throw ConfigError("config: 'mode' must be a string");
    c.mode = ParseRepMode(root.at("mode").get<std::string>());
  }
  ReadSize(root, "batch_size", "", &c.batch_size);
  ReadDouble(root, "noam_factor", "", &c.noam_factor);
  ReadSize(root, "warmup", "", &c.warmup);
  ReadSize(root, "max_steps", "", &c.max_steps);
  ReadSize(root, "chunk_frames", "", &c.chunk_frames);
  ReadDouble(root, "rep_source_global_ratio", "", &c.rep_source_global_ratio);
  ReadDouble(root, "global_enroll_s", "", &c.global_enroll_s);
  ReadSize(root, "checkpoint_every", "", &c.checkpoint_every);
  if (root.contains("seed")) {
    const Json &v = root.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("config: 'seed' must be a non-negative integer");
    }
    c.seed = v.get<std::uint64_t>();
  }
  if (root.contains("extractor")) ReadExtractor(root.at("extractor"), &c.model.extractor);
  if (root.contains("detector")) ReadDetector(root.at("detector"), &c.model.detector);

  c.Validate();
  CheckPositive(c.model.extractor.kernel, "extractor.kernel");
  CheckPositive(c.model.extractor.attention_dim, "extractor.attention_dim");
  CheckPositive(c.model.extractor.fit_frames, "extractor.fit_frames");
  const auto &d = c.model.detector;
  CheckPositive(d.cnn_layers, "detector.cnn_layers");
  CheckPositive(d.cnn_channels, "detector.cnn_channels");
  CheckPositive(d.cnn_kernel, "detector.cnn_kernel");
  CheckPositive(d.cnn_stride, "detector.cnn_stride");
  CheckPositive(d.model_dim, "detector.model_dim");
  CheckPositive(d.hidden, "detector.hidden");
  CheckPositive(d.mixer_layers, "detector.mixer_layers");
  return c;
}

TrainConfig ReadTrainConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseTrainConfig(ss.str());
}

std::string TrainConfigToJson(const TrainConfig &c) {
  const auto &e = c.model.extractor;
  const auto &d = c.model.detector;
  Json root = {
      {"mode", RepModeName(c.mode)},
      {"batch_size", c.batch_size},
      {"noam_factor", c.noam_factor},
      {"warmup", c.warmup},
      {"max_steps", c.max_steps},
      {"chunk_frames", c.chunk_frames},
      {"rep_source_global_ratio", c.rep_source_global_ratio},
      {"global_enroll_s", c.global_enroll_s},
      {"checkpoint_every", c.checkpoint_every},
      {"seed", c.seed},
      {"extractor",
       {{"channels", e.channels},
        {"kernel", e.kernel},
        {"attention_dim", e.attention_dim},
        {"fit_frames", e.fit_frames}}},
      {"detector",
       {{"cnn_layers", d.cnn_layers},
        {"cnn_channels", d.cnn_channels},
        {"cnn_kernel", d.cnn_kernel},
        {"cnn_stride", d.cnn_stride},
        {"model_dim", d.model_dim},
        {"hidden", d.hidden},
        {"mixer_layers", d.mixer_layers},
        {"num_blocks", d.num_blocks},
        {"chunk_frames", d.chunk_frames}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace mtead
