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

#ifndef MTEAD_PIPELINE_H_
#define MTEAD_PIPELINE_H_

#include <string>
#include <vector>

#include "mtead/ahc.h"
#include "mtead/model.h"
#include "mtead/mfcc.h"
#include "mtead/rttm.h"

namespace mtead {

// CMVN-normalized MFCCs with the default front end.
FeatureSequence SessionFeatures(const AudioSignal &audio);

// One representation per mask row with at least one active frame, in row
// order: eval-mode z-vectors or window-averaged external reps, per the
// model's rep mode.
std::vector<SpeakerRep> RepsFromMask(const FeatureSequence &feats, const SpeakerMask &mask,
                                     const Model &model);

// First stage: sliding-window embeddings clustered by AHC, painted into
// speaker masks.
SpeakerMask AhcMasks(const FeatureSequence &feats, const Model &model, const AhcConfig &config);
SegmentList AhcSegments(const FeatureSequence &feats, const Model &model, const AhcConfig &config,
                        const std::string &recording_id);

// Second stage: detector posteriors conditioned on the reps of `init`.
DetectorOutput DetectFromMask(const FeatureSequence &feats, const SpeakerMask &init,
                              const Model &model);
SegmentList Diarize(const FeatureSequence &feats, const SpeakerMask &init, const Model &model,
                    const std::string &recording_id, double threshold = 0.5,
                    std::size_t median_win = 11);

// Converts an init RTTM to masks on the feature grid. Speakers keep their
// first-onset order.
SpeakerMask InitMask(const SegmentList &init, const FeatureSequence &feats);

// Threshold grid used when calibrating the AHC stopping distance.
std::vector<double> DefaultThresholdGrid();

}  // namespace mtead

#endif  // MTEAD_PIPELINE_H_
