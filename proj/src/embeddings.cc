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

#include "mtead/embeddings.h"

#include <cmath>
#include <fstream>
#include <set>

#include "mtead/error.h"
#include "mtead/fmat.h"
#include "mtead/ops.h"

namespace mtead {

Tensor AspPool(Graph *g, const Tensor &h, const AspParams &p, std::vector<double> *alpha) {
  if (h.rank() != 2) throw ShapeError("asp: expected [T x C], got " + ShapeToString(h.dims()));
  const std::size_t t_len = h.dim(0);
  Tensor e = AddBias(g, MatMul(g, Tanh(g, AddBias(g, MatMul(g, h, p.w), p.b)), p.v), p.k);
  Tensor a = Softmax(g, Reshape(g, e, {1, t_len}));
  if (alpha != nullptr) *alpha = a.ToVector();
  Tensor mu = MatMul(g, a, h);
  Tensor second = MatMul(g, a, Mul(g, h, h));
  Tensor var = Sub(g, second, Mul(g, mu, mu));
  Tensor floor(Shape{1, h.dim(1)}, std::vector<double>(h.dim(1), kAspVarianceFloor));
  Tensor sigma = Sqrt(g, Add(g, var, floor));
  return ConcatLast(g, {mu, sigma});
}

ResidualBlock ResidualBlock::Create(ParameterSet *params, const std::string &prefix,
                                    std::size_t in, std::size_t out, std::size_t kernel,
                                    Rng *rng) {
  ResidualBlock b;
  b.conv1 = Conv1dLayer::Create(params, prefix + ".conv1", in, out, kernel, 2, rng);
  b.conv2 = Conv1dLayer::Create(params, prefix + ".conv2", out, out, kernel, 1, rng);
  b.skip = Conv1dLayer::Create(params, prefix + ".skip", in, out, 1, 2, rng);
  return b;
}

Tensor ResidualBlock::Forward(Graph *g, const Tensor &x) const {
  Tensor h = Relu(g, TimeNorm(g, conv1.Forward(g, x)));
  h = TimeNorm(g, conv2.Forward(g, h));
  return Relu(g, Add(g, h, skip.Forward(g, x)));
}

ZExtractor ZExtractor::Create(ParameterSet *params, const std::string &prefix,
                              const ExtractorConfig &config, Rng *rng) {
  if (config.channels.empty()) throw ConfigError("extractor: no residual blocks configured");
  if (config.fit_frames == 0 || config.input_dim == 0 || config.attention_dim == 0) {
    throw ConfigError("extractor: dimensions must be positive");
  }
  ZExtractor z;
  z.config_ = config;
  std::size_t in = config.input_dim;
  for (std::size_t i = 0; i < config.channels.size(); ++i) {
    z.blocks_.push_back(ResidualBlock::Create(params, prefix + ".block" + std::to_string(i), in,
                                              config.channels[i], config.kernel, rng));
    in = config.channels[i];
  }
  const std::size_t a = config.attention_dim;
  z.asp_.w = params->Create(prefix + ".asp.w", {in, a});
  z.asp_.b = params->Create(prefix + ".asp.b", {a});
  z.asp_.v = params->Create(prefix + ".asp.v", {a, 1});
  z.asp_.k = params->Create(prefix + ".asp.k", {1});
  InitFanIn(&z.asp_.w, in, rng);
  InitFanIn(&z.asp_.v, a, rng);
  z.out_ = Linear::Create(params, prefix + ".out", 2 * in, kRepDim, rng);
  return z;
}

Tensor ZExtractor::Forward(Graph *g, const Tensor &frames) const {
  if (frames.rank() != 2 || frames.dim(1) != config_.input_dim) {
    throw ShapeError("extractor: expected [T x " + std::to_string(config_.input_dim) + "], got " +
                     ShapeToString(frames.dims()));
  }
  Tensor h = frames;
  for (const auto &b : blocks_) h = b.Forward(g, h);
  return out_.Forward(g, AspPool(g, h, asp_));
}

Matrix FitFrames(const Matrix &frames, std::size_t target, Rng *crop_rng) {
  const std::size_t n = frames.rows(), f = frames.cols();
  if (n == 0) throw DataError("fit frames: empty sequence");
  Matrix out(target, f);
  std::size_t start = 0;
  if (n > target) {
    start = crop_rng == nullptr ? (n - target) / 2 : (*crop_rng)() % (n - target + 1);
  }
  for (std::size_t t = 0; t < target; ++t) {
    const auto src = frames.Row(n > target ? start + t : t % n);
    std::copy(src.begin(), src.end(), out.Row(t).begin());
  }
  return out;
}

Matrix FitActiveFrames(const Matrix &feats, std::span<const double> mask_row, std::size_t target,
                       Rng *crop_rng) {
  if (mask_row.size() != feats.rows()) {
    throw ShapeError("mask row has " + std::to_string(mask_row.size()) + " frames, features " +
                     std::to_string(feats.rows()));
  }
  std::size_t active = 0;
  for (double m : mask_row) active += m != 0.0;
  Matrix gathered(active, feats.cols());
  for (std::size_t t = 0, r = 0; t < mask_row.size(); ++t) {
    if (mask_row[t] == 0.0) continue;
    const auto src = feats.Row(t);
    std::copy(src.begin(), src.end(), gathered.Row(r++).begin());
  }
  if (active == 0) return gathered;
  return FitFrames(gathered, target, crop_rng);
}

Tensor MatrixToTensor(const Matrix &m, bool requires_grad) {
  return Tensor(Shape{m.rows(), m.cols()}, m.data(), requires_grad);
}

Matrix TensorToMatrix(const Tensor &t) {
  if (t.rank() != 2) throw ShapeError("expected a 2-D tensor, got " + ShapeToString(t.dims()));
  Matrix m(t.dim(0), t.dim(1));
  const auto v = t.ToVector();
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

Tensor ZExtractor::Embed(Graph *g, const Matrix &feats, std::span<const double> mask_row,
                         const std::string &speaker, Rng *crop_rng) const {
  Matrix fitted = FitActiveFrames(feats, mask_row, config_.fit_frames, crop_rng);
  if (fitted.rows() == 0) throw DataError("extractor: speaker " + speaker + " has no active frames");
  return Forward(g, MatrixToTensor(fitted));
}

SpeakerRep ExtractZvector(const FeatureSequence &feats, std::span<const double> mask_row,
                          const ZExtractor &extractor, const std::string &speaker) {
  Graph g(false);
  Tensor z = extractor.Embed(&g, feats.frames, mask_row, speaker);
  return {z.ToVector(), RepSource::kZvector, speaker};
}

namespace {

std::size_t SecondsToFrames(double s, double shift) {
  return static_cast<std::size_t>(std::llround(s / shift));
}

Matrix SliceRows(const Matrix &m, std::size_t start, std::size_t count) {
  Matrix out(count, m.cols());
  std::copy(m.data().begin() + start * m.cols(), m.data().begin() + (start + count) * m.cols(),
            out.data().begin());
  return out;
}

}  // namespace

std::vector<WindowEmbedding> WindowEmbeddings(const FeatureSequence &feats,
                                              const ZExtractor &extractor, double win_s,
                                              double hop_s) {
  const std::size_t win = SecondsToFrames(win_s, feats.frame_shift_s);
  const std::size_t hop = SecondsToFrames(hop_s, feats.frame_shift_s);
  if (win == 0 || hop == 0) throw ConfigError("window embeddings: window and hop must be >= 1 frame");
  const std::size_t t_len = feats.num_frames();
  if (t_len < win) {
    throw DataError("window embeddings: " + std::to_string(t_len) + " frames is shorter than one " +
                    std::to_string(win) + "-frame window");
  }
  std::vector<WindowEmbedding> out;
  Graph g(false);
  for (std::size_t start = 0; start + win <= t_len; start += hop) {
    Matrix fitted = FitFrames(SliceRows(feats.frames, start, win), extractor.config().fit_frames, nullptr);
    Tensor z = extractor.Forward(&g, MatrixToTensor(fitted));
    const double center = (static_cast<double>(start) + 0.5 * static_cast<double>(win)) * feats.frame_shift_s;
    out.push_back({center, {z.ToVector(), RepSource::kWindow, ""}});
  }
  return out;
}

void L2Normalize(std::vector<double> *v) {
  double s = 0;
  for (double x : *v) s += x * x;
  const double n = std::sqrt(s);
  if (!(n > 0) || !std::isfinite(n)) throw DataError("cannot normalize a zero or non-finite vector");
  if (std::abs(n - 1.0) <= 1e-12) return;
  for (double &x : *v) x /= n;
}

SpeakerRep AveragedWindowRep(const FeatureSequence &feats, std::span<const double> mask_row,
                             const ZExtractor &extractor, const std::string &speaker) {
  FeatureSequence active;
  active.frame_shift_s = feats.frame_shift_s;
  active.frame_length_s = feats.frame_length_s;
  std::size_t n = 0;
  for (double m : mask_row) n += m != 0.0;
  if (n == 0) throw DataError("external rep: speaker " + speaker + " has no active frames");
  active.frames = FitActiveFrames(feats.frames, mask_row, n, nullptr);
  const std::size_t win = SecondsToFrames(1.5, feats.frame_shift_s);
  if (n < win) active.frames = FitFrames(active.frames, win, nullptr);
  std::vector<double> mean(kRepDim, 0.0);
  const auto windows = WindowEmbeddings(active, extractor);
  for (const auto &w : windows) {
    for (std::size_t i = 0; i < kRepDim; ++i) mean[i] += w.rep.vector[i];
  }
  for (double &x : mean) x /= static_cast<double>(windows.size());
  L2Normalize(&mean);
  return {mean, RepSource::kExternal, speaker};
}

void SaveExternalEmbeddings(const std::string &path, const std::vector<SpeakerRep> &reps) {
  Matrix m(reps.size(), kRepDim);
  std::string ids;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].vector.size() != kRepDim) {
      throw DataError("embedding for " + reps[i].speaker_id + " has dimension " +
                      std::to_string(reps[i].vector.size()));
    }
    std::copy(reps[i].vector.begin(), reps[i].vector.end(), m.Row(i).begin());
    ids += reps[i].speaker_id + "\n";
  }
  WriteFmat(path, m);
  std::ofstream out(path + ".ids");
  if (!out) throw DataError("cannot write " + path + ".ids");
  out << ids;
}

std::map<std::string, SpeakerRep> LoadExternalEmbeddings(const std::string &path) {
  const Matrix m = ReadFmat(path);
  if (m.cols() != kRepDim) {
    throw DataError(path + ": embeddings have dimension " + std::to_string(m.cols()) + ", expected " +
                    std::to_string(kRepDim));
  }
  std::ifstream in(path + ".ids");
  if (!in) throw DataError("cannot open speaker list " + path + ".ids");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  if (ids.size() != m.rows()) {
    throw DataError(path + ": " + std::to_string(m.rows()) + " vectors but " +
                    std::to_string(ids.size()) + " speaker ids");
  }
  std::map<std::string, SpeakerRep> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    SpeakerRep r{{m.Row(i).begin(), m.Row(i).end()}, RepSource::kExternal, ids[i]};
    L2Normalize(&r.vector);
    if (!out.emplace(ids[i], std::move(r)).second) throw DataError(path + ": duplicate speaker id " + ids[i]);
  }
  return out;
}

}  // namespace mtead
