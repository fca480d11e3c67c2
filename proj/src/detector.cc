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

#include "mtead/detector.h"

#include <algorithm>

#include "mtead/error.h"
#include "mtead/ops.h"

namespace mtead {
namespace {

Linear ZeroLinear(ParameterSet *params, const std::string &prefix, std::size_t in, std::size_t out) {
  Linear l;
  l.weight = params->Create(prefix + ".weight", {in, out});
  l.bias = params->Create(prefix + ".bias", {out});
  return l;
}

}  // namespace

TimeSpeakerBlock TimeSpeakerBlock::Create(ParameterSet *params, const std::string &prefix,
                                          std::size_t dim, std::size_t hidden, Rng *rng) {
  TimeSpeakerBlock b;
  b.time_rnn = BiLstm::Create(params, prefix + ".time_rnn", dim, hidden, 1, rng);
  b.time_proj = ZeroLinear(params, prefix + ".time_proj", 2 * hidden, dim);
  b.speaker_rnn = BiLstm::Create(params, prefix + ".speaker_rnn", dim, hidden, 1, rng);
  b.speaker_proj = ZeroLinear(params, prefix + ".speaker_proj", 2 * hidden, dim);
  return b;
}

Tensor TimeSpeakerBlock::TimeStage(Graph *g, const Tensor &x) const {
  return Add(g, time_proj.Forward(g, time_rnn.Forward(g, x)), x);
}

Tensor TimeSpeakerBlock::SpeakerStage(Graph *g, const Tensor &x) const {
  Tensor y = SwapAxes01(g, x);  // [N x T x D]: one speaker sequence per frame
  Tensor out = Add(g, speaker_proj.Forward(g, speaker_rnn.Forward(g, y)), y);
  return SwapAxes01(g, out);
}

Tensor TimeSpeakerBlock::Forward(Graph *g, const Tensor &x) const {
  return SpeakerStage(g, TimeStage(g, x));
}

Detector Detector::Create(ParameterSet *params, const std::string &prefix,
                          const DetectorConfig &config, Rng *rng) {
  if (config.cnn_layers == 0 || config.cnn_stride == 0 || config.model_dim == 0 ||
      config.hidden == 0 || config.mixer_layers == 0) {
    throw ConfigError("detector: layer counts and sizes must be positive");
  }
  Detector d;
  d.config_ = config;
  std::size_t in = config.feat_dim;
  for (std::size_t i = 0; i < config.cnn_layers; ++i) {
    d.cnn_.push_back(Conv1dLayer::Create(params, prefix + ".cnn" + std::to_string(i), in,
                                         config.cnn_channels, config.cnn_kernel,
                                         i == 0 ? config.cnn_stride : 1, rng));
    in = config.cnn_channels;
  }
  d.mixer_ = BiLstm::Create(params, prefix + ".mixer", config.cnn_channels + config.rep_dim,
                            config.hidden, config.mixer_layers, rng);
  d.mixer_proj_ = Linear::Create(params, prefix + ".mixer_proj", 2 * config.hidden,
                                 config.model_dim, rng);
  for (std::size_t i = 0; i < config.num_blocks; ++i) {
    d.blocks_.push_back(TimeSpeakerBlock::Create(params, prefix + ".block" + std::to_string(i),
                                                 config.model_dim, config.hidden, rng));
  }
  d.head_ = Linear::Create(params, prefix + ".head", config.model_dim, 1, rng);
  return d;
}

Tensor Detector::Frontend(Graph *g, const Tensor &feats) const {
  if (feats.rank() != 2 || feats.dim(1) != config_.feat_dim) {
    throw ShapeError("detector: expected features [T x " + std::to_string(config_.feat_dim) +
                     "], got " + ShapeToString(feats.dims()));
  }
  Tensor h = feats;
  for (const auto &c : cnn_) h = Relu(g, c.Forward(g, h));
  return h;
}

Tensor Detector::Mix(Graph *g, const Tensor &frontend, const Tensor &reps) const {
  if (reps.rank() != 2 || reps.dim(1) != config_.rep_dim) {
    throw DataError("detector: speaker representations must be [N x " +
                    std::to_string(config_.rep_dim) + "], got " + ShapeToString(reps.dims()));
  }
  return mixer_proj_.Forward(g, mixer_.Forward(g, BroadcastConcat(g, frontend, reps)));
}

Tensor Detector::Contextualize(Graph *g, const Tensor &x) const {
  Tensor h = x;
  for (const auto &b : blocks_) h = b.Forward(g, h);
  return h;
}

Tensor Detector::Head(Graph *g, const Tensor &x) const {
  Tensor logits = head_.Forward(g, x);  // [T x N x 1]
  return Sigmoid(g, Reshape(g, logits, {x.dim(0), x.dim(1)}));
}

Tensor Detector::Forward(Graph *g, const Tensor &feats, const Tensor &reps) const {
  Tensor p = Head(g, Contextualize(g, Mix(g, Frontend(g, feats), reps)));
  if (config_.cnn_stride == 1) return p;
  // Repeat each output frame over the input frames it covers.
  const std::size_t t_in = feats.dim(0), t_out = p.dim(0);
  Tensor up({t_in, t_out});
  for (std::size_t t = 0; t < t_in; ++t) up.at(t, std::min(t / config_.cnn_stride, t_out - 1)) = 1.0;
  return MatMul(g, up, p);
}

Tensor StackReps(const std::vector<SpeakerRep> &reps, std::size_t rep_dim) {
  if (reps.empty()) throw DataError("detector: no speaker representations");
  std::vector<double> v;
  v.reserve(reps.size() * rep_dim);
  for (const auto &r : reps) {
    if (r.vector.size() != rep_dim) {
      throw DataError("speaker representation for '" + r.speaker_id + "' has dimension " +
                      std::to_string(r.vector.size()) + ", expected " + std::to_string(rep_dim));
    }
    v.insert(v.end(), r.vector.begin(), r.vector.end());
  }
  return Tensor({reps.size(), rep_dim}, std::move(v));
}

DetectorOutput Detect(const FeatureSequence &feats, const std::vector<SpeakerRep> &reps,
                      const Detector &detector) {
  const std::size_t t_len = feats.num_frames();
  if (t_len == 0) throw DataError("detect: empty feature sequence");
  const Tensor r = StackReps(reps, detector.config().rep_dim);
  DetectorOutput out;
  out.frame_shift_s = feats.frame_shift_s;
  for (const auto &rep : reps) out.speakers.push_back(rep.speaker_id);
  out.posteriors = Matrix(t_len, reps.size());
  const std::size_t chunk = detector.config().chunk_frames == 0
                                ? t_len
                                : std::min(t_len, detector.config().chunk_frames);
  std::size_t done = 0;
  while (done < t_len) {
    const std::size_t start = std::min(done, t_len - chunk);
    Matrix piece(chunk, feats.dim());
    std::copy(feats.frames.data().begin() + start * feats.dim(),
              feats.frames.data().begin() + (start + chunk) * feats.dim(), piece.data().begin());
    const Tensor p = detector.Forward(nullptr, MatrixToTensor(piece), r);
    for (std::size_t t = done; t < start + chunk; ++t) {
      for (std::size_t n = 0; n < reps.size(); ++n) out.posteriors(t, n) = p.at(t - start, n);
    }
    done = start + chunk;
  }
  return out;
}

std::vector<double> MedianFilter(std::span<const double> x, std::size_t win) {
  if (win % 2 == 0) throw ConfigError("median filter window must be odd, got " + std::to_string(win));
  const std::size_t n = x.size(), half = win / 2;
  std::vector<double> out(n), buf(win);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < win; ++k) {
      const long idx = static_cast<long>(t + k) - static_cast<long>(half);
      buf[k] = x[static_cast<std::size_t>(std::clamp<long>(idx, 0, static_cast<long>(n) - 1))];
    }
    std::nth_element(buf.begin(), buf.begin() + half, buf.end());
    out[t] = buf[half];
  }
  return out;
}

SegmentList PosteriorsToRttm(const DetectorOutput &out, const std::string &recording_id,
                             double threshold, std::size_t median_win) {
  if (median_win % 2 == 0) {
    throw ConfigError("median filter window must be odd, got " + std::to_string(median_win));
  }
  const std::size_t t_len = out.posteriors.rows(), n = out.posteriors.cols();
  SpeakerMask m;
  m.speakers = out.speakers;
  m.frame_shift_s = out.frame_shift_s;
  m.mask = Matrix(n, t_len);
  std::vector<double> row(t_len);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < t_len; ++t) row[t] = out.posteriors(t, s);
    const auto f = MedianFilter(row, median_win);
    for (std::size_t t = 0; t < t_len; ++t) m.mask(s, t) = f[t] > threshold ? 1.0 : 0.0;
  }
  return MaskToSegments(m, recording_id);
}

}  // namespace mtead
