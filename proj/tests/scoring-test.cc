#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "grid-scorer.h"
#include "mtead/error.h"
#include "mtead/scoring.h"

namespace mtead {
namespace {

SegmentList Relabel(SegmentList segs, const std::string &prefix) {
  for (auto &s : segs) s.speaker = prefix + s.speaker;
  return segs;
}

TEST_CASE("der known cases") {
  const SegmentList ref = {{"r", "A", 0, 10}};
  auto rep = ScoreDer(ref, {{"r", "A", 0, 8}}, 0.0);
  CHECK(rep.missed_s == doctest::Approx(2.0));
  CHECK(rep.der == 0.2);
  CHECK(FormatReport(rep).rfind("DER=20.00 MISS=20.00 FA=0.00 CONF=0.00", 0) == 0);

  auto empty = ScoreDer(ref, {}, 0.0);
  CHECK(empty.der == 1.0);
  CHECK(empty.mapping.empty());
  CHECK(empty.jer == 1.0);

  const SegmentList two = {{"r", "A", 0, 5}, {"r", "B", 4, 6}, {"r", "A", 12, 3}};
  auto same = ScoreDer(two, two);
  CHECK(same.der == 0.0);
  CHECK(same.jer == 0.0);
  CHECK(FormatReport(same) == "DER=0.00 MISS=0.00 FA=0.00 CONF=0.00 JER=0.00");

  auto relabeled = ScoreDer(two, Relabel(two, "x"));
  CHECK(relabeled.der == 0.0);
  CHECK(relabeled.mapping.at("A") == "xA");
  CHECK(relabeled.mapping.at("B") == "xB");

  auto none = ScoreDer({}, two);
  CHECK(none.empty_reference);
  CHECK(none.der == 0.0);
  CHECK_THROWS_AS(Jer({}, two, {}), DataError);
}

TEST_CASE("confusion and false alarm") {
  // Second half attributed to the wrong speaker; hyp speech in silence.
  const SegmentList ref = {{"r", "A", 0, 4}, {"r", "B", 4, 4}};
  const SegmentList hyp = {{"r", "a", 0, 6}, {"r", "b", 6, 2}, {"r", "a", 10, 1}};
  auto rep = ScoreDer(ref, hyp, 0.0);
  CHECK(rep.confusion_s == doctest::Approx(2.0));
  CHECK(rep.false_alarm_s == doctest::Approx(1.0));
  CHECK(rep.missed_s == doctest::Approx(0.0));
  CHECK(rep.der == doctest::Approx(3.0 / 8.0));
  CHECK(rep.der == doctest::Approx(testing::GridDer(ref, hyp, 0.0)));
}

TEST_CASE("overlap excluded on request") {
  const SegmentList ref = {{"r", "A", 0, 4}, {"r", "B", 2, 4}};
  const SegmentList hyp = {{"r", "a", 0, 6}};
  auto with = ScoreDer(ref, hyp, 0.0, true);
  CHECK(with.scored_speech_s == doctest::Approx(8.0));
  auto without = ScoreDer(ref, hyp, 0.0, false);
  CHECK(without.scored_speech_s == doctest::Approx(4.0));
  CHECK(without.der == doctest::Approx(testing::GridDer(ref, hyp, 0.0, false)));
}

TEST_CASE("assignment matches permutation brute force") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nr = 1 + rng() % 5, nh = 1 + rng() % 5;
    std::vector<std::vector<double>> w(nr, std::vector<double>(nh));
    for (auto &row : w) {
      for (auto &v : row) v = (rng() % 4 == 0) ? 0.0 : static_cast<double>(rng() % 100);
    }
    const auto got = MaxWeightAssignment(w);
    double got_value = 0;
    std::vector<int> seen;
    for (std::size_t r = 0; r < nr; ++r) {
      if (got[r] < 0) continue;
      got_value += w[r][got[r]];
      seen.push_back(got[r]);
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    // Pad to a square matrix with zeros and try every permutation.
    const std::size_t n = std::max(nr, nh);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
      double v = 0;
      for (std::size_t r = 0; r < nr; ++r) {
        if (static_cast<std::size_t>(perm[r]) < nh) v += w[r][perm[r]];
      }
      best = std::max(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got_value == best);
  }
}

TEST_CASE("3x3 handcrafted mapping") {
  // Co-activity: A-y 3 s, A-x 2 s, B-x 4 s, C-z 1 s, C-y 2.5 s.
  const SegmentList ref = {{"r", "A", 0, 5}, {"r", "B", 10, 4}, {"r", "C", 20, 3.5}};
  const SegmentList hyp = {{"r", "x", 0, 2},  {"r", "y", 2, 3},  {"r", "x", 10, 4},
                           {"r", "z", 20, 1}, {"r", "y", 21, 2.5}};
  auto m = OptimalMapping(ref, hyp);
  // Six permutations score 3, 4.5, 8, 3, 6.5 and 0; A-y, B-x, C-z wins.
  CHECK(m.at("A") == "y");
  CHECK(m.at("B") == "x");
  CHECK(m.at("C") == "z");
}

TEST_CASE("jer") {
  const SegmentList ref = {{"r", "A", 0, 2}};
  CHECK(Jer(ref, {{"r", "h", 1, 2}}, {{"A", "h"}}) == doctest::Approx(2.0 / 3.0));
  CHECK(Jer(ref, ref, {{"A", "A"}}) == 0.0);
  CHECK(Jer(ref, {}, {}) == 1.0);
  // Unmapped reference speakers count fully.
  const SegmentList two = {{"r", "A", 0, 2}, {"r", "B", 5, 2}};
  CHECK(Jer(two, {{"r", "h", 0, 2}}, {{"A", "h"}}) == doctest::Approx(0.5));
}

TEST_CASE("interval scorer equals grid oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto ref = testing::RandomMsSegments(rng, "R", 4, 20);
    const auto hyp = trial % 2 ? testing::RandomMsSegments(rng, "H", 4, 20) : Relabel(ref, "H");
    const double collar = trial % 3 == 0 ? 0.0 : 0.25;
    const auto rep = ScoreDer(ref, hyp, collar);
    CHECK(std::abs(rep.der - testing::GridDer(ref, hyp, collar)) < 1e-6);
    CHECK(rep.missed_s >= 0);
    CHECK(rep.false_alarm_s >= 0);
    CHECK(rep.confusion_s >= 0);
    if (!rep.empty_reference) {
      CHECK(rep.missed_s + rep.false_alarm_s + rep.confusion_s ==
            doctest::Approx(rep.der * rep.scored_speech_s));
    }
  }
}

TEST_CASE("collar monotonicity and relabel invariance") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ref = testing::RandomMsSegments(rng, "R");
    const auto hyp = testing::RandomMsSegments(rng, "H");
    double prev = 1e300;
    for (double c : {0.0, 0.1, 0.25, 0.5, 1.0}) {
      const double s = ScoreDer(ref, hyp, c).scored_speech_s;
      CHECK(s <= prev + 1e-9);
      prev = s;
    }
    const auto a = ScoreDer(ref, hyp);
    const auto b = ScoreDer(ref, Relabel(hyp, "q"));
    CHECK(a.der == doctest::Approx(b.der).epsilon(1e-12));
    CHECK(a.jer == doctest::Approx(b.jer).epsilon(1e-12));
  }
}

}  // namespace
}  // namespace mtead
