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

#include "mtead/rttm.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "mtead/error.h"

namespace mtead {
namespace {

std::vector<std::string> SplitFields(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double ParseTime(const std::string &tok, std::size_t lineno, const char *what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw FormatError("rttm line " + std::to_string(lineno) + ": bad " + what + " '" + tok + "'");
  }
  return v;
}

std::string FormatTime(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void SortSegments(SegmentList *segments) {
  std::stable_sort(segments->begin(), segments->end(), [](const Segment &a, const Segment &b) {
    return std::tie(a.onset_s, a.speaker, a.duration_s) <
           std::tie(b.onset_s, b.speaker, b.duration_s);
  });
}

std::map<std::string, SegmentList> ParseRttm(const std::string &text) {
  std::map<std::string, SegmentList> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = SplitFields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (fields.size() != 10) {
      throw FormatError("rttm line " + std::to_string(lineno) + ": expected 10 fields, got " +
                        std::to_string(fields.size()));
    }
    if (fields[0] != "SPEAKER") {
      throw FormatError("rttm line " + std::to_string(lineno) + ": unsupported record type '" +
                        fields[0] + "'");
    }
    Segment s;
    s.recording_id = fields[1];
    s.onset_s = ParseTime(fields[3], lineno, "onset");
    s.duration_s = ParseTime(fields[4], lineno, "duration");
    s.speaker = fields[7];
    if (s.onset_s < 0) {
      throw FormatError("rttm line " + std::to_string(lineno) + ": negative onset " + fields[3]);
    }
    if (s.duration_s <= 0) {
      throw FormatError("rttm line " + std::to_string(lineno) + ": non-positive duration " +
                        fields[4]);
    }
    out[s.recording_id].push_back(std::move(s));
  }
  for (auto &[rec, segs] : out) SortSegments(&segs);
  return out;
}

std::map<std::string, SegmentList> ReadRttm(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("rttm: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ParseRttm(ss.str());
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string WriteRttm(const SegmentList &segments) {
  std::string out;
  for (const auto &s : segments) {
    out += "SPEAKER " + s.recording_id + " 1 " + FormatTime(s.onset_s) + " " +
           FormatTime(s.duration_s) + " <NA> <NA> " + s.speaker + " <NA> <NA>\n";
  }
  return out;
}

void WriteRttmFile(const std::string &path, const SegmentList &segments) {
  std::ofstream out(path);
  if (!out) throw FormatError("rttm: cannot write " + path);
  out << WriteRttm(segments);
}

std::vector<std::string> SpeakersByFirstOnset(const SegmentList &segments) {
  std::map<std::string, double> first;
  for (const auto &s : segments) {
    auto it = first.find(s.speaker);
    if (it == first.end() || s.onset_s < it->second) first[s.speaker] = s.onset_s;
  }
  std::vector<std::pair<double, std::string>> order;
  for (const auto &[spk, t] : first) order.emplace_back(t, spk);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  for (auto &[t, spk] : order) out.push_back(spk);
  return out;
}

SpeakerMask SegmentsToMask(const SegmentList &segments, double frame_shift_s,
                           std::size_t total_frames,
                           const std::optional<std::vector<std::string>> &speakers) {
  SpeakerMask m;
  m.frame_shift_s = frame_shift_s;
  m.speakers = speakers ? *speakers : SpeakersByFirstOnset(segments);
  m.mask = Matrix(m.speakers.size(), total_frames);
  std::map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < m.speakers.size(); ++i) {
    if (!row.emplace(m.speakers[i], i).second) {
      throw ConfigError("mask: duplicate speaker id " + m.speakers[i]);
    }
  }
  for (const auto &s : segments) {
    auto it = row.find(s.speaker);
    if (it == row.end()) continue;
    const double first = std::floor(s.onset_s / frame_shift_s - 0.5) - 1;
    const double last = std::ceil(s.end_s() / frame_shift_s) + 1;
    const std::size_t lo = first < 0 ? 0 : static_cast<std::size_t>(first);
    const std::size_t hi = std::min<std::size_t>(total_frames, static_cast<std::size_t>(std::max(0.0, last)));
    for (std::size_t t = lo; t < hi; ++t) {
      const double c = (static_cast<double>(t) + 0.5) * frame_shift_s;
      if (c >= s.onset_s && c < s.end_s()) m.mask(it->second, t) = 1.0;
    }
  }
  return m;
}

SegmentList MaskToSegments(const SpeakerMask &mask, const std::string &recording_id) {
  SegmentList out;
  const std::size_t t_len = mask.num_frames();
  for (std::size_t i = 0; i < mask.num_speakers(); ++i) {
    std::size_t t = 0;
    while (t < t_len) {
      if (mask.mask(i, t) == 0.0) {
        ++t;
        continue;
      }
      const std::size_t start = t;
      while (t < t_len && mask.mask(i, t) != 0.0) ++t;
      out.push_back({recording_id, mask.speakers[i],
                     static_cast<double>(start) * mask.frame_shift_s,
                     static_cast<double>(t - start) * mask.frame_shift_s});
    }
  }
  SortSegments(&out);
  return out;
}

}  // namespace mtead
