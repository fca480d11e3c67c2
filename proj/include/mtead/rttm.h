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

#ifndef MTEAD_RTTM_H_
#define MTEAD_RTTM_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtead/matrix.h"

namespace mtead {

struct Segment {
  std::string recording_id;
  std::string speaker;
  double onset_s = 0;
  double duration_s = 0;

  double end_s() const { return onset_s + duration_s; }
  bool operator==(const Segment &) const = default;
};

// Segments of one recording, sorted by onset then speaker.
using SegmentList = std::vector<Segment>;

// N x T binary speaker occurrence labels; row i belongs to speakers[i].
struct SpeakerMask {
  std::vector<std::string> speakers;
  Matrix mask;
  double frame_shift_s = 0.01;

  std::size_t num_speakers() const { return speakers.size(); }
  std::size_t num_frames() const { return mask.cols(); }
};

void SortSegments(SegmentList *segments);

// Parses `SPEAKER <rec> <chan> <tbeg> <tdur> <NA> <NA> <spk> <NA> <NA>` lines.
// Blank lines and lines starting with '#' are skipped; anything else that is
// not a well-formed SPEAKER line raises FormatError with the line number.
std::map<std::string, SegmentList> ParseRttm(const std::string &text);
std::map<std::string, SegmentList> ReadRttm(const std::string &path);

// Times are written with three decimals.
std::string WriteRttm(const SegmentList &segments);
void WriteRttmFile(const std::string &path, const SegmentList &segments);

// Distinct speakers ordered by first onset, ties broken lexicographically.
std::vector<std::string> SpeakersByFirstOnset(const SegmentList &segments);

// Frame t of speaker s is 1 iff the frame centre (t + 0.5) * shift lies in
// one of s's segments. Rows follow `speakers` when given (speakers without
// segments get zero rows), else SpeakersByFirstOnset.
SpeakerMask SegmentsToMask(const SegmentList &segments, double frame_shift_s,
                           std::size_t total_frames,
                           const std::optional<std::vector<std::string>> &speakers = std::nullopt);

// Maximal runs of ones become segments [t0 * shift, t1 * shift).
SegmentList MaskToSegments(const SpeakerMask &mask, const std::string &recording_id);

}  // namespace mtead

#endif  // MTEAD_RTTM_H_
