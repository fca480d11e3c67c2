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

#include "mtead/scoring.h"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

#include "mtead/error.h"

namespace mtead {
namespace {

using Intervals = std::vector<std::pair<double, double>>;

Intervals Merge(Intervals iv) {
  std::sort(iv.begin(), iv.end());
  Intervals out;
  for (const auto &[a, b] : iv) {
    if (!out.empty() && a <= out.back().second) {
      out.back().second = std::max(out.back().second, b);
    } else {
      out.emplace_back(a, b);
    }
  }
  return out;
}

struct Speakers {
  std::vector<std::string> names;
  std::vector<Intervals> intervals;
};

Speakers ByFirstOnset(const SegmentList &segs) {
  Speakers s;
  s.names = SpeakersByFirstOnset(segs);
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < s.names.size(); ++i) idx[s.names[i]] = i;
  s.intervals.resize(s.names.size());
  for (const auto &seg : segs) s.intervals[idx[seg.speaker]].emplace_back(seg.onset_s, seg.end_s());
  for (auto &iv : s.intervals) iv = Merge(std::move(iv));
  return s;
}

bool Contains(const Intervals &iv, double t) {
  auto it = std::upper_bound(iv.begin(), iv.end(), t,
                             [](double v, const std::pair<double, double> &p) { return v < p.first; });
  if (it == iv.begin()) return false;
  --it;
  return t < it->second;
}

double Length(const Intervals &iv) {
  double s = 0;
  for (const auto &[a, b] : iv) s += b - a;
  return s;
}

double IntersectionLength(const Intervals &x, const Intervals &y) {
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].first, y[j].first);
    const double hi = std::min(x[i].second, y[j].second);
    if (hi > lo) s += hi - lo;
    if (x[i].second < y[j].second) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

// Elementary pieces between consecutive breakpoints with the speakers active
// in each.
struct Piece {
  double begin, end;
  bool scored;
  std::vector<int> ref, hyp;
};

std::vector<Piece> Sweep(const Speakers &ref, const Speakers &hyp, const Intervals &noscore,
                         bool score_overlap) {
  std::vector<double> pts;
  for (const auto *s : {&ref, &hyp}) {
    for (const auto &iv : s->intervals) {
      for (const auto &[a, b] : iv) {
        pts.push_back(a);
        pts.push_back(b);
      }
    }
  }
  for (const auto &[a, b] : noscore) {
    pts.push_back(a);
    pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Piece> out;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    Piece p{pts[k], pts[k + 1], true, {}, {}};
    const double mid = 0.5 * (p.begin + p.end);
    for (std::size_t r = 0; r < ref.intervals.size(); ++r) {
      if (Contains(ref.intervals[r], mid)) p.ref.push_back(static_cast<int>(r));
    }
    for (std::size_t h = 0; h < hyp.intervals.size(); ++h) {
      if (Contains(hyp.intervals[h], mid)) p.hyp.push_back(static_cast<int>(h));
    }
    if (p.ref.empty() && p.hyp.empty()) continue;
    p.scored = !Contains(noscore, mid) && (score_overlap || p.ref.size() <= 1);
    out.push_back(std::move(p));
  }
  return out;
}

SpeakerMapping ToMapping(const Speakers &ref, const Speakers &hyp,
                         const std::vector<std::vector<double>> &w) {
  SpeakerMapping m;
  const auto assign = MaxWeightAssignment(w);
  for (std::size_t r = 0; r < assign.size(); ++r) {
    if (assign[r] >= 0 && w[r][assign[r]] > 0) m[ref.names[r]] = hyp.names[assign[r]];
  }
  return m;
}

}  // namespace

std::vector<int> MaxWeightAssignment(const std::vector<std::vector<double>> &weight) {
  const std::size_t nr = weight.size();
  const std::size_t nh = nr == 0 ? 0 : weight[0].size();
  std::vector<int> best(nr, -1), cur(nr, -1);
  if (nr == 0 || nh == 0) return best;
  // Optimistic bound: each remaining ref row takes its largest weight.
  std::vector<double> suffix_bound(nr + 1, 0.0);
  for (std::size_t r = nr; r-- > 0;) {
    suffix_bound[r] = suffix_bound[r + 1] + *std::max_element(weight[r].begin(), weight[r].end());
  }
  std::vector<char> used(nh, 0);
  double best_value = -1;
  std::function<void(std::size_t, double)> dfs = [&](std::size_t r, double value) {
    if (value + suffix_bound[r] <= best_value) return;
    if (r == nr) {
      best_value = value;
      best = cur;
      return;
    }
    for (std::size_t h = 0; h < nh; ++h) {
      if (used[h]) continue;
      used[h] = 1;
      cur[r] = static_cast<int>(h);
      dfs(r + 1, value + weight[r][h]);
      used[h] = 0;
    }
    cur[r] = -1;
    dfs(r + 1, value);
  };
  dfs(0, 0.0);
  return best;
}

SpeakerMapping OptimalMapping(const SegmentList &ref, const SegmentList &hyp) {
  const auto r = ByFirstOnset(ref), h = ByFirstOnset(hyp);
  std::vector<std::vector<double>> w(r.names.size(), std::vector<double>(h.names.size(), 0.0));
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    for (std::size_t j = 0; j < h.names.size(); ++j) {
      w[i][j] = IntersectionLength(r.intervals[i], h.intervals[j]);
    }
  }
  return ToMapping(r, h, w);
}

ScoreReport ScoreDer(const SegmentList &ref, const SegmentList &hyp, double collar_s,
                     bool score_overlap) {
  if (!(collar_s >= 0)) throw ConfigError("der: collar must be >= 0");
  const auto r = ByFirstOnset(ref), h = ByFirstOnset(hyp);
  Intervals noscore;
  if (collar_s > 0) {
    for (const auto &iv : r.intervals) {
      for (const auto &[a, b] : iv) {
        noscore.emplace_back(a - collar_s, a + collar_s);
        noscore.emplace_back(b - collar_s, b + collar_s);
      }
    }
    noscore = Merge(std::move(noscore));
  }
  const auto pieces = Sweep(r, h, noscore, score_overlap);

  std::vector<std::vector<double>> w(r.names.size(), std::vector<double>(h.names.size(), 0.0));
  for (const auto &p : pieces) {
    if (!p.scored) continue;
    for (int i : p.ref) {
      for (int j : p.hyp) w[i][j] += p.end - p.begin;
    }
  }
  ScoreReport rep;
  rep.mapping = ToMapping(r, h, w);
  std::vector<int> map_idx(r.names.size(), -1);
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    auto it = rep.mapping.find(r.names[i]);
    if (it == rep.mapping.end()) continue;
    map_idx[i] = static_cast<int>(std::find(h.names.begin(), h.names.end(), it->second) - h.names.begin());
  }
  for (const auto &p : pieces) {
    if (!p.scored) continue;
    const double len = p.end - p.begin;
    const std::size_t nr = p.ref.size(), nh = p.hyp.size();
    std::size_t correct = 0;
    for (int i : p.ref) {
      if (map_idx[i] >= 0 && std::find(p.hyp.begin(), p.hyp.end(), map_idx[i]) != p.hyp.end()) ++correct;
    }
    rep.scored_speech_s += len * nr;
    if (nr > nh) rep.missed_s += len * (nr - nh);
    if (nh > nr) rep.false_alarm_s += len * (nh - nr);
    rep.confusion_s += len * (std::min(nr, nh) - correct);
  }
  if (rep.scored_speech_s > 0) {
    rep.der = (rep.missed_s + rep.false_alarm_s + rep.confusion_s) / rep.scored_speech_s;
  } else {
    rep.empty_reference = true;
  }
  rep.jer = r.names.empty() ? 0.0 : Jer(ref, hyp, OptimalMapping(ref, hyp));
  return rep;
}

double Jer(const SegmentList &ref, const SegmentList &hyp, const SpeakerMapping &mapping) {
  const auto r = ByFirstOnset(ref), h = ByFirstOnset(hyp);
  if (r.names.empty()) throw DataError("jer: no reference speakers");
  double total = 0;
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    auto it = mapping.find(r.names[i]);
    if (it == mapping.end()) {
      total += 1;
      continue;
    }
    const auto hit = std::find(h.names.begin(), h.names.end(), it->second);
    if (hit == h.names.end()) {
      total += 1;
      continue;
    }
    const auto &hi = h.intervals[hit - h.names.begin()];
    const double inter = IntersectionLength(r.intervals[i], hi);
    const double uni = Length(r.intervals[i]) + Length(hi) - inter;
    total += uni > 0 ? 1.0 - inter / uni : 1.0;
  }
  return total / static_cast<double>(r.names.size());
}

ScoreReport ScoreRecordings(const std::map<std::string, SegmentList> &ref,
                            const std::map<std::string, SegmentList> &hyp, double collar_s,
                            bool score_overlap) {
  std::set<std::string> ids;
  for (const auto &[id, segs] : ref) ids.insert(id);
  for (const auto &[id, segs] : hyp) ids.insert(id);
  ScoreReport total;
  double jer_sum = 0.0;
  std::size_t jer_count = 0;
  const SegmentList none;
  for (const auto &id : ids) {
    const auto r = ref.find(id);
    const auto h = hyp.find(id);
    const ScoreReport one = ScoreDer(r == ref.end() ? none : r->second,
                                     h == hyp.end() ? none : h->second, collar_s, score_overlap);
    total.missed_s += one.missed_s;
    total.false_alarm_s += one.false_alarm_s;
    total.confusion_s += one.confusion_s;
    total.scored_speech_s += one.scored_speech_s;
    for (const auto &[a, b] : one.mapping) total.mapping[id + "/" + a] = id + "/" + b;
    if (r != ref.end() && !r->second.empty()) {
      jer_sum += one.jer;
      ++jer_count;
    }
  }
  total.empty_reference = total.scored_speech_s <= 0.0;
  total.der = total.empty_reference
                  ? 0.0
                  : (total.missed_s + total.false_alarm_s + total.confusion_s) / total.scored_speech_s;
  total.jer = jer_count ? jer_sum / static_cast<double>(jer_count) : 0.0;
  return total;
}

std::string FormatReport(const ScoreReport &report) {
  const double s = report.scored_speech_s > 0 ? 100.0 / report.scored_speech_s : 0.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "DER=%.2f MISS=%.2f FA=%.2f CONF=%.2f JER=%.2f", 100.0 * report.der,
                report.missed_s * s, report.false_alarm_s * s, report.confusion_s * s, 100.0 * report.jer);
  return buf;
}

}  // namespace mtead
