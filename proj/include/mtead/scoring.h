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

#ifndef MTEAD_SCORING_H_
#define MTEAD_SCORING_H_

#include <map>
#include <string>
#include <vector>

#include "mtead/rttm.h"

namespace mtead {

// Reference speaker -> hypothesis speaker; one-to-one, partial.
using SpeakerMapping = std::map<std::string, std::string>;

struct ScoreReport {
  double der = 0;
  double jer = 0;
  double missed_s = 0;
  double false_alarm_s = 0;
  double confusion_s = 0;
  double scored_speech_s = 0;
  SpeakerMapping mapping;
  // Set when nothing was left to score; der is then 0.
  bool empty_reference = false;
};

// Assignment maximizing the summed weight of mapped pairs; weight[r][h] >= 0.
// Returns hyp index per ref index, -1 when unmapped. Exact (branch and bound).
std::vector<int> MaxWeightAssignment(const std::vector<std::vector<double>> &weight);

// Mapping maximizing total time where mapped pairs are active together.
// Pairs with zero co-activity are left unmapped.
SpeakerMapping OptimalMapping(const SegmentList &ref, const SegmentList &hyp);

// md-eval style DER: +-collar around every reference boundary is not scored;
// with score_overlap false, regions with more than one reference speaker are
// skipped too. The mapping maximizes correctly attributed scored time.
ScoreReport ScoreDer(const SegmentList &ref, const SegmentList &hyp, double collar_s = 0.25,
                     bool score_overlap = true);

// Mean over reference speakers of 1 - |r & h| / |r | h|; unmapped speakers
// count as 1. Throws DataError without reference speakers.
double Jer(const SegmentList &ref, const SegmentList &hyp, const SpeakerMapping &mapping);

// Pools every recording of either side: DER over summed error and scored
// time, JER as the mean over recordings with reference speech. Mapping keys
// are "<recording>/<speaker>".
ScoreReport ScoreRecordings(const std::map<std::string, SegmentList> &ref,
                            const std::map<std::string, SegmentList> &hyp, double collar_s = 0.25,
                            bool score_overlap = true);

// `DER=.. MISS=.. FA=.. CONF=.. JER=..`, percentages with two decimals.
std::string FormatReport(const ScoreReport &report);

}  // namespace mtead

#endif  // MTEAD_SCORING_H_
