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

#ifndef MTEAD_EMBEDDINGS_H_
#define MTEAD_EMBEDDINGS_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtead/layers.h"
#include "mtead/matrix.h"
#include "mtead/mfcc.h"

namespace mtead {

constexpr std::size_t kRepDim = 40;

enum class RepSource { kZvector, kExternal, kWindow };

struct SpeakerRep {
  std::vector<double> vector;  // kRepDim values
  RepSource source = RepSource::kZvector;
  std::string speaker_id;
};

struct ExtractorConfig {
  std::size_t input_dim = 20;
  std::vector<std::size_t> channels = {16, 32, 64, 128};
  std::size_t kernel = 3;
  std::size_t attention_dim = 64;
  std::size_t fit_frames = 500;
};

// Attentive statistics pooling:
//   e_t = v . tanh(W h_t + b) + k,  alpha = softmax(e),
//   mu = sum_t alpha_t h_t,  sigma = sqrt(sum_t alpha_t h_t^2 - mu^2 + 1e-8).
struct AspParams {
  Tensor w;  // [C x A]
  Tensor b;  // [A]
  Tensor v;  // [A x 1]
  Tensor k;  // [1]
};

constexpr double kAspVarianceFloor = 1e-8;

// h[T x C] -> [1 x 2C] = mu ++ sigma. Optionally returns alpha.
Tensor AspPool(Graph *g, const Tensor &h, const AspParams &p, std::vector<double> *alpha = nullptr);

// conv(stride 2) - norm - relu - conv - norm, plus a strided 1x1 projection
// skip, relu after the sum. Norm is per-channel over time.
struct ResidualBlock {
  Conv1dLayer conv1, conv2, skip;

  static ResidualBlock Create(ParameterSet *params, const std::string &prefix, std::size_t in,
                              std::size_t out, std::size_t kernel, Rng *rng);
  Tensor Forward(Graph *g, const Tensor &x) const;
};

// Residual conv stack -> ASP -> linear to kRepDim.
class ZExtractor {
 public:
  static ZExtractor Create(ParameterSet *params, const std::string &prefix,
                           const ExtractorConfig &config, Rng *rng);

  const ExtractorConfig &config() const { return config_; }

  // frames[T x input_dim] -> [1 x kRepDim].
  Tensor Forward(Graph *g, const Tensor &frames) const;

  // Gathers the active frames of `mask_row`, fits them to fit_frames and runs
  // Forward. Eval mode (crop_rng null) takes a centred crop; training mode a
  // uniformly random one. Throws DataError naming `speaker` when no frame is
  // active.
  Tensor Embed(Graph *g, const Matrix &feats, std::span<const double> mask_row,
               const std::string &speaker, Rng *crop_rng = nullptr) const;

 private:
  ExtractorConfig config_;
  std::vector<ResidualBlock> blocks_;
  AspParams asp_;
  Linear out_;
};

// Rows of `feats` where mask_row != 0, cropped or cyclically repeated to
// exactly `target` rows.
Matrix FitActiveFrames(const Matrix &feats, std::span<const double> mask_row, std::size_t target,
                       Rng *crop_rng);
Matrix FitFrames(const Matrix &frames, std::size_t target, Rng *crop_rng);

Tensor MatrixToTensor(const Matrix &m, bool requires_grad = false);
Matrix TensorToMatrix(const Tensor &t);

// Eval-mode z-vector of one speaker.
SpeakerRep ExtractZvector(const FeatureSequence &feats, std::span<const double> mask_row,
                          const ZExtractor &extractor, const std::string &speaker);

struct WindowEmbedding {
  double center_s = 0;
  SpeakerRep rep;
};

// One embedding per win_s window every hop_s. Throws DataError when the
// sequence is shorter than one window.
std::vector<WindowEmbedding> WindowEmbeddings(const FeatureSequence &feats,
                                              const ZExtractor &extractor, double win_s = 1.5,
                                              double hop_s = 0.75);

// Mean of window embeddings over a speaker's active frames, L2-normalized;
// the stand-in for an externally pretrained embedding.
SpeakerRep AveragedWindowRep(const FeatureSequence &feats, std::span<const double> mask_row,
                             const ZExtractor &extractor, const std::string &speaker);

void L2Normalize(std::vector<double> *v);

// External embeddings: FMAT (speakers x kRepDim) at `path` and speaker ids,
// one per line, at `path + ".ids"`. Loading L2-normalizes (vectors already
// at unit norm are kept bit-exact).
void SaveExternalEmbeddings(const std::string &path, const std::vector<SpeakerRep> &reps);
std::map<std::string, SpeakerRep> LoadExternalEmbeddings(const std::string &path);

}  // namespace mtead

#endif  // MTEAD_EMBEDDINGS_H_
