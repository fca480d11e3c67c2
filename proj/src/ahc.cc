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

#include "mtead/ahc.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtead/error.h"
#include "mtead/scoring.h"

namespace mtead {

double CosineDistance(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size()) throw ShapeError("cosine distance: dimension mismatch");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) return 1.0;
  return std::clamp(1.0 - ab / std::sqrt(aa * bb), 0.0, 2.0);
}

Clustering AhcCluster(const std::vector<std::vector<double>> &vectors, const AhcConfig &config) {
  const std::size_t n = vectors.size();
  if (n == 0) throw DataError("ahc: no embeddings");
  if (config.mode == AhcConfig::Mode::kOracle &&
      (config.num_clusters < 1 || config.num_clusters > n)) {
    throw ConfigError("ahc: oracle cluster count " + std::to_string(config.num_clusters) +
                      " outside [1, " + std::to_string(n) + "]");
  }
  // Cluster c is identified by its smallest member; sums hold total pairwise
  // distance between clusters so averages are sum / (|a| |b|).
  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum[i][j] = sum[j][i] = CosineDistance(vectors[i], vectors[j]);
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<int> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[i] = static_cast<int>(i);
  std::vector<std::size_t> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = i;

  Clustering out;
  while (alive.size() > 1) {
    if (config.mode == AhcConfig::Mode::kOracle && alive.size() == config.num_clusters) break;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t x = 0; x < alive.size(); ++x) {
      for (std::size_t y = x + 1; y < alive.size(); ++y) {
        const std::size_t i = alive[x], j = alive[y];
        const double d = sum[i][j] / static_cast<double>(size[i] * size[j]);
        if (d < best) best = d, bi = i, bj = j;
      }
    }
    if (config.mode == AhcConfig::Mode::kThreshold && best > config.threshold) break;
    out.merge_distances.push_back(best);
    for (std::size_t k : alive) {
      if (k == bi || k == bj) continue;
      sum[bi][k] = sum[k][bi] = sum[bi][k] + sum[bj][k];
    }
    size[bi] += size[bj];
    for (auto &o : owner) {
      if (o == static_cast<int>(bj)) o = static_cast<int>(bi);
    }
    alive.erase(std::find(alive.begin(), alive.end(), bj));
  }
  std::vector<int> label(n, -1);
  out.num_clusters = static_cast<int>(alive.size());
  for (std::size_t k = 0; k < alive.size(); ++k) label[alive[k]] = static_cast<int>(k);
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.assignment[i] = label[owner[i]];
  return out;
}

Clustering AhcCluster(const std::vector<WindowEmbedding> &windows, const AhcConfig &config) {
  std::vector<std::vector<double>> v;
  v.reserve(windows.size());
  for (const auto &w : windows) v.push_back(w.rep.vector);
  return AhcCluster(v, config);
}

SpeakerMask BuildSpeakerMasks(const Clustering &clustering, const std::vector<double> &centers,
                              std::size_t total_frames, double frame_shift_s, double win_s) {
  if (centers.size() != clustering.assignment.size()) {
    throw ShapeError("masks: " + std::to_string(centers.size()) + " centres for " +
                     std::to_string(clustering.assignment.size()) + " windows");
  }
  SpeakerMask m;
  m.frame_shift_s = frame_shift_s;
  for (int k = 0; k < clustering.num_clusters; ++k) m.speakers.push_back("cluster" + std::to_string(k));
  m.mask = Matrix(m.speakers.size(), total_frames);
  for (std::size_t w = 0; w < centers.size(); ++w) {
    const double lo = centers[w] - 0.5 * win_s, hi = centers[w] + 0.5 * win_s;
    for (std::size_t t = 0; t < total_frames; ++t) {
      const double c = (static_cast<double>(t) + 0.5) * frame_shift_s;
      if (c >= lo && c < hi) m.mask(clustering.assignment[w], t) = 1.0;
    }
  }
  return m;
}

double CalibrateThreshold(const std::vector<AhcCalibrationItem> &items,
                          const std::vector<double> &grid) {
  if (items.empty() || grid.empty()) throw DataError("threshold calibration needs sessions and a grid");
  double best_tau = grid.front(), best_der = std::numeric_limits<double>::infinity();
  for (double tau : grid) {
    double total = 0;
    for (const auto &item : items) {
      const auto c = AhcCluster(item.windows, AhcConfig::Threshold(tau));
      std::vector<double> centers;
      for (const auto &w : item.windows) centers.push_back(w.center_s);
      const auto mask = BuildSpeakerMasks(c, centers, item.total_frames, item.frame_shift_s);
      const auto rec = item.truth.empty() ? std::string("rec") : item.truth.front().recording_id;
      total += ScoreDer(item.truth, MaskToSegments(mask, rec)).der;
    }
    const double mean = total / static_cast<double>(items.size());
    if (mean < best_der) best_der = mean, best_tau = tau;
  }
  return best_tau;
}

}  // namespace mtead
