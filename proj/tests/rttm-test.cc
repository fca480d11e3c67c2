#include <cmath>
#include <random>

#include "doctest.h"
#include "mtead/error.h"
#include "mtead/rttm.h"

namespace mtead {
namespace {

SegmentList RandomSegments(std::mt19937_64 &rng, const std::string &rec) {
  std::uniform_real_distribution<double> onset(0, 100), dur(0.002, 10);
  SegmentList out;
  const int n = static_cast<int>(rng() % 30);
  for (int i = 0; i < n; ++i) {
    out.push_back({rec, "spk" + std::to_string(rng() % 5), onset(rng), dur(rng)});
  }
  SortSegments(&out);
  return out;
}

TEST_CASE("parse_rttm basics") {
  auto m = ParseRttm("SPEAKER rec 1 0.50 2.30 <NA> <NA> spkA <NA> <NA>\n");
  REQUIRE(m.size() == 1);
  REQUIRE(m["rec"].size() == 1);
  CHECK(m["rec"][0] == Segment{"rec", "spkA", 0.5, 2.3});

  CHECK(ParseRttm("").empty());
  CHECK(ParseRttm("\n# comment\n   \n").empty());

  auto multi = ParseRttm(
      "SPEAKER b 1 3 1 <NA> <NA> x <NA> <NA>\r\n"
      "SPEAKER a 1 2 1 <NA> <NA> y <NA> <NA>\n"
      "SPEAKER a 1 1 1 <NA> <NA> z <NA> <NA>\n"
      "SPEAKER a 1 1 1 <NA> <NA> w <NA> <NA>\n");
  CHECK(multi.size() == 2);
  CHECK(multi["a"][0].speaker == "w");
  CHECK(multi["a"][1].speaker == "z");
  CHECK(multi["a"][2].speaker == "y");
}

TEST_CASE("parse_rttm errors name the line") {
  auto fails_with = [](const std::string &text, const std::string &needle) {
    try {
      ParseRttm(text);
    } catch (const FormatError &e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with("SPEAKER rec 1 -1 2 <NA> <NA> a <NA> <NA>\n", "line 1"));
  CHECK(fails_with("\nSPEAKER rec 1 1 -2 <NA> <NA> a <NA> <NA>\n", "line 2"));
  CHECK(fails_with("SPEAKER rec 1 1 0 <NA> <NA> a <NA> <NA>\n", "duration"));
  CHECK(fails_with("SPEAKER rec 1 1 2 <NA> <NA> a <NA>\n", "expected 10 fields"));
  CHECK(fails_with("SPEAKER rec 1 x 2 <NA> <NA> a <NA> <NA>\n", "onset"));
  CHECK(fails_with("SPEAKER rec 1 1 nan <NA> <NA> a <NA> <NA>\n", "duration"));
  CHECK(fails_with("SPKR-INFO rec 1 1 2 <NA> <NA> a <NA> <NA>\n", "record type"));
}

TEST_CASE("write_rttm formatting") {
  CHECK(WriteRttm({}).empty());
  const auto text = WriteRttm({{"r", "s", 1.23456, 0.5}});
  CHECK(text == "SPEAKER r 1 1.235 0.500 <NA> <NA> s <NA> <NA>\n");
}

TEST_CASE("rttm round trip within 1 ms") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto segs = RandomSegments(rng, "rec" + std::to_string(trial));
    const auto parsed = ParseRttm(WriteRttm(segs));
    if (segs.empty()) {
      CHECK(parsed.empty());
      continue;
    }
    const auto &back = parsed.at(segs[0].recording_id);
    REQUIRE(back.size() == segs.size());
    // Rounding can reorder segments whose onsets differ by under 1 ms, so
    // compare as multisets keyed by speaker and rounded onset.
    for (const auto &s : segs) {
      bool found = false;
      for (const auto &b : back) {
        if (b.speaker == s.speaker && std::abs(b.onset_s - s.onset_s) <= 0.0005 + 1e-9 &&
            std::abs(b.duration_s - s.duration_s) <= 0.0005 + 1e-9) {
          found = true;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("segments_to_mask") {
  auto m = SegmentsToMask({{"r", "spkA", 0.0, 1.0}}, 0.01, 100);
  REQUIRE(m.num_speakers() == 1);
  for (std::size_t t = 0; t < 100; ++t) CHECK(m.mask(0, t) == 1.0);

  auto empty = SegmentsToMask({}, 0.01, 50);
  CHECK(empty.num_speakers() == 0);
  CHECK(empty.mask.rows() == 0);

  auto two = SegmentsToMask({{"r", "b", 0.0, 0.06}, {"r", "a", 0.03, 0.05}}, 0.01, 10);
  REQUIRE(two.speakers == std::vector<std::string>{"b", "a"});
  const std::vector<double> row_b = {1, 1, 1, 1, 1, 1, 0, 0, 0, 0};
  const std::vector<double> row_a = {0, 0, 0, 1, 1, 1, 1, 1, 0, 0};
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(two.mask(0, t) == row_b[t]);
    CHECK(two.mask(1, t) == row_a[t]);
  }

  // Same first onset: lexicographic order.
  auto tie = SegmentsToMask({{"r", "z", 0.0, 0.1}, {"r", "m", 0.0, 0.2}}, 0.01, 30);
  CHECK(tie.speakers == std::vector<std::string>{"m", "z"});

  // Centre rule: segment [0.004, 0.006) contains centre 0.005 of frame 0.
  auto centre = SegmentsToMask({{"r", "a", 0.004, 0.002}}, 0.01, 3);
  CHECK(centre.mask(0, 0) == 1.0);
  CHECK(centre.mask(0, 1) == 0.0);
  auto miss = SegmentsToMask({{"r", "a", 0.006, 0.008}}, 0.01, 3);
  CHECK(miss.mask(0, 0) == 0.0);
  CHECK(miss.mask(0, 1) == 0.0);
}

TEST_CASE("mask_to_segments") {
  SpeakerMask m;
  m.speakers = {"a", "b"};
  m.mask = Matrix(2, 7);
  const double row[] = {0, 0, 1, 1, 1, 0, 0};
  for (std::size_t t = 0; t < 7; ++t) m.mask(0, t) = row[t];
  auto segs = MaskToSegments(m, "r");
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].speaker == "a");
  CHECK(segs[0].onset_s == doctest::Approx(0.02));
  CHECK(segs[0].end_s() == doctest::Approx(0.05));
}

TEST_CASE("mask round trip on random masks") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    SpeakerMask m;
    const std::size_t n = rng() % 5, t_len = rng() % 400;
    m.frame_shift_s = trial % 2 ? 0.01 : 0.025;
    for (std::size_t i = 0; i < n; ++i) m.speakers.push_back("s" + std::to_string(i));
    m.mask = Matrix(n, t_len);
    const double density = (rng() % 100) / 100.0;
    for (auto &v : m.mask.data()) v = (rng() % 1000) / 1000.0 < density ? 1.0 : 0.0;
    auto segs = MaskToSegments(m, "r");
    auto back = SegmentsToMask(segs, m.frame_shift_s, t_len, m.speakers);
    CHECK(back.speakers == m.speakers);
    CHECK(back.mask == m.mask);
  }
}

}  // namespace
}  // namespace mtead
