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

#ifndef MTEAD_DETECTOR_H_
#define MTEAD_DETECTOR_H_

#include <cstddef>
#include <string>
#include <vector>

#include "mtead/embeddings.h"
#include "mtead/layers.h"
#include "mtead/matrix.h"
#include "mtead/mfcc.h"
#include "mtead/rttm.h"

namespace mtead {

struct DetectorConfig {
  std::size_t feat_dim = 20;
  std::size_t cnn_layers = 4;
  std::size_t cnn_channels = 32;
  std::size_t cnn_kernel = 5;
  // Time subsampling of the first conv layer; posteriors are repeated back
  // to the input frame rate.
  std::size_t cnn_stride = 1;
  std::size_t rep_dim = kRepDim;
  std::size_t model_dim = 64;  // D
  std::size_t hidden = 64;     // per direction
  std::size_t mixer_layers = 2;
  std::size_t num_blocks = 3;
  // Inference runs in chunks of this many frames (0: whole sequence).
  std::size_t chunk_frames = 500;
};

// Speaker-detection tensors are stored time-major as [T x N x D].
//
// Time stage:    X~^i = Linear(BiLSTM over t of X^i) + X^i
// Speaker stage: Y~^j = Linear(BiLSTM over i of Y^j) + Y^j
// Both projections start at zero, so a fresh block is the identity.
struct TimeSpeakerBlock {
  BiLstm time_rnn;
  Linear time_proj;
  BiLstm speaker_rnn;
  Linear speaker_proj;

  static TimeSpeakerBlock Create(ParameterSet *params, const std::string &prefix, std::size_t dim,
                                 std::size_t hidden, Rng *rng);
  Tensor TimeStage(Graph *g, const Tensor &x) const;
  Tensor SpeakerStage(Graph *g, const Tensor &x) const;
  Tensor Forward(Graph *g, const Tensor &x) const;
};

class Detector {
 public:
  static Detector Create(ParameterSet *params, const std::string &prefix,
                         const DetectorConfig &config, Rng *rng);

  const DetectorConfig &config() const { return config_; }

  // feats[T x F] -> [T' x C], T' = ceil(T / cnn_stride).
  Tensor Frontend(Graph *g, const Tensor &feats) const;
  // frontend[T x C], reps[N x R] -> [T x N x D].
  Tensor Mix(Graph *g, const Tensor &frontend, const Tensor &reps) const;
  Tensor Contextualize(Graph *g, const Tensor &x) const;
  // [T x N x D] -> posteriors [T x N].
  Tensor Head(Graph *g, const Tensor &x) const;

  // Full network on one chunk: feats[T x F], reps[N x R] -> posteriors [T x N].
  Tensor Forward(Graph *g, const Tensor &feats, const Tensor &reps) const;

  const std::vector<TimeSpeakerBlock> &blocks() const { return blocks_; }
  const Linear &head() const { return head_; }

 private:
  DetectorConfig config_;
  std::vector<Conv1dLayer> cnn_;
  BiLstm mixer_;
  Linear mixer_proj_;
  std::vector<TimeSpeakerBlock> blocks_;
  Linear head_;
};

// Stacks speaker representations into [N x R]; throws DataError on a
// dimension mismatch or an empty list.
Tensor StackReps(const std::vector<SpeakerRep> &reps, std::size_t rep_dim = kRepDim);

struct DetectorOutput {
  Matrix posteriors;  // T x N
  std::vector<std::string> speakers;
  double frame_shift_s = 0.01;
};

// Inference over a whole session in chunk_frames pieces; the last chunk is
// aligned to the end of the sequence.
DetectorOutput Detect(const FeatureSequence &feats, const std::vector<SpeakerRep> &reps,
                      const Detector &detector);

// Median filter (odd window, edge replication) per speaker, threshold
// (strictly greater), runs to segments.
SegmentList PosteriorsToRttm(const DetectorOutput &out, const std::string &recording_id,
                             double threshold = 0.5, std::size_t median_win = 11);

std::vector<double> MedianFilter(std::span<const double> x, std::size_t win);

}  // namespace mtead

#endif  // MTEAD_DETECTOR_H_
