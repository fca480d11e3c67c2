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

#include "mtead/pipeline.h"

#include "mtead/error.h"

namespace mtead {

FeatureSequence SessionFeatures(const AudioSignal &audio) { return Cmvn(Mfcc(audio)); }

std::vector<SpeakerRep> RepsFromMask(const FeatureSequence &feats, const SpeakerMask &mask,
                                     const Model &model) {
  if (mask.num_frames() != feats.num_frames()) {
    throw ShapeError("mask has " + std::to_string(mask.num_frames()) + " frames, features have " +
                     std::to_string(feats.num_frames()));
  }
  std::vector<SpeakerRep> reps;
  for (std::size_t n = 0; n < mask.num_speakers(); ++n) {
    const auto row = mask.mask.Row(n);
    bool active = false;
    for (double m : row) active = active || m != 0.0;
    if (!active) continue;
    if (model.config().rep_mode == RepMode::kZvector) {
      reps.push_back(ExtractZvector(feats, row, model.extractor(), mask.speakers[n]));
    } else {
      reps.push_back(AveragedWindowRep(feats, row, model.extractor(), mask.speakers[n]));
    }
  }
  return reps;
}

SpeakerMask AhcMasks(const FeatureSequence &feats, const Model &model, const AhcConfig &config) {
  const auto windows = WindowEmbeddings(feats, model.extractor());
  const Clustering c = AhcCluster(windows, config);
  std::vector<double> centers;
  centers.reserve(windows.size());
  for (const auto &w : windows) centers.push_back(w.center_s);
  return BuildSpeakerMasks(c, centers, feats.num_frames(), feats.frame_shift_s);
}

SegmentList AhcSegments(const FeatureSequence &feats, const Model &model, const AhcConfig &config,
                        const std::string &recording_id) {
  return MaskToSegments(AhcMasks(feats, model, config), recording_id);
}

DetectorOutput DetectFromMask(const FeatureSequence &feats, const SpeakerMask &init,
                              const Model &model) {
  const auto reps = RepsFromMask(feats, init, model);
  if (reps.empty()) throw DataError("init mask has no active speaker");
  return Detect(feats, reps, model.detector());
}

SegmentList Diarize(const FeatureSequence &feats, const SpeakerMask &init, const Model &model,
                    const std::string &recording_id, double threshold, std::size_t median_win) {
  return PosteriorsToRttm(DetectFromMask(feats, init, model), recording_id, threshold, median_win);
}

SpeakerMask InitMask(const SegmentList &init, const FeatureSequence &feats) {
  return SegmentsToMask(init, feats.frame_shift_s, feats.num_frames());
}

std::vector<double> DefaultThresholdGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(0.05 * i);
  return grid;
}

}  // namespace mtead
