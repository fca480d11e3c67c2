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

#ifndef MTEAD_AHC_H_
#define MTEAD_AHC_H_

#include <cstddef>
#include <string>
#include <vector>

#include "mtead/embeddings.h"
#include "mtead/rttm.h"

namespace mtead {

struct AhcConfig {
  enum class Mode { kThreshold, kOracle };
  Mode mode = Mode::kThreshold;
  double threshold = 0.5;    // threshold mode: merge while min distance <= threshold
  std::size_t num_clusters = 1;  // oracle mode

  static AhcConfig Threshold(double t) { return {Mode::kThreshold, t, 1}; }
  static AhcConfig Oracle(std::size_t k) { return {Mode::kOracle, 0.0, k}; }
};

struct Clustering {
  std::vector<int> assignment;  // per input vector, ids 0..K-1 by smallest member
  int num_clusters = 0;
  std::vector<double> merge_distances;  // in merge order
};

// 1 - cos(a, b) clamped to [0, 2]; a zero vector is at distance 1.
double CosineDistance(const std::vector<double> &a, const std::vector<double> &b);

// Average-linkage agglomerative clustering on cosine distance. Ties go to
// the lowest (i, j) pair of clusters indexed by their smallest member.
Clustering AhcCluster(const std::vector<std::vector<double>> &vectors, const AhcConfig &config);
Clustering AhcCluster(const std::vector<WindowEmbedding> &windows, const AhcConfig &config);

// Paints each window's [center - win_s / 2, center + win_s / 2) span onto
// its cluster's row (frame-centre rule). Rows are named "cluster<k>".
SpeakerMask BuildSpeakerMasks(const Clustering &clustering, const std::vector<double> &centers,
                              std::size_t total_frames, double frame_shift_s, double win_s = 1.5);

// One session's first-stage inputs for threshold calibration.
struct AhcCalibrationItem {
  std::vector<WindowEmbedding> windows;
  std::size_t total_frames = 0;
  double frame_shift_s = 0.01;
  SegmentList truth;
};

// Threshold from `grid` minimizing mean DER (collar 0.25) of the AHC masks
// against truth; the first best value wins ties.
double CalibrateThreshold(const std::vector<AhcCalibrationItem> &items,
                          const std::vector<double> &grid);

}  // namespace mtead

#endif  // MTEAD_AHC_H_
