#include <random>

#include "ahc-oracle.h"
#include "doctest.h"
#include "mtead/ahc.h"
#include "mtead/error.h"

namespace mtead {
namespace {

TEST_CASE("cosine distance") {
  CHECK(CosineDistance({1, 0}, {1, 0}) == 0.0);
  CHECK(CosineDistance({1, 0}, {0, 2}) == doctest::Approx(1.0));
  CHECK(CosineDistance({1, 0}, {-3, 0}) == doctest::Approx(2.0));
  CHECK(CosineDistance({0, 0}, {1, 0}) == 1.0);
}

TEST_CASE("oracle mode extremes") {
  std::mt19937_64 rng(1);
  const auto x = testing::RandomClusteredPoints(rng, 7, 5);
  auto one = AhcCluster(x, AhcConfig::Oracle(1));
  CHECK(one.num_clusters == 1);
  for (int a : one.assignment) CHECK(a == 0);
  auto all = AhcCluster(x, AhcConfig::Oracle(7));
  CHECK(all.num_clusters == 7);
  for (int i = 0; i < 7; ++i) CHECK(all.assignment[i] == i);
  CHECK_THROWS_AS(AhcCluster(x, AhcConfig::Oracle(8)), ConfigError);
  CHECK_THROWS_AS(AhcCluster(x, AhcConfig::Oracle(0)), ConfigError);
  CHECK_THROWS_AS(AhcCluster(std::vector<std::vector<double>>{}, AhcConfig::Oracle(1)), DataError);
}

TEST_CASE("threshold extremes") {
  std::mt19937_64 rng(2);
  const auto x = testing::RandomClusteredPoints(rng, 9, 4);
  CHECK(AhcCluster(x, AhcConfig::Threshold(-0.1)).num_clusters == 9);
  CHECK(AhcCluster(x, AhcConfig::Threshold(2.0)).num_clusters == 1);
}

TEST_CASE("two tight groups") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0, 0.02);
  std::vector<std::vector<double>> x;
  for (int i = 0; i < 10; ++i) {
    const bool first = i % 2 == 0;
    x.push_back({(first ? 1.0 : 0.0) + nd(rng), (first ? 0.0 : 1.0) + nd(rng), nd(rng)});
  }
  auto c = AhcCluster(x, AhcConfig::Threshold(0.5));
  REQUIRE(c.num_clusters == 2);
  for (int i = 0; i < 10; ++i) CHECK(c.assignment[i] == i % 2);
  CHECK(c.assignment == testing::BruteForceAhc(x, false, 0.5, 0));
}

TEST_CASE("matches exhaustive average linkage") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto x = testing::RandomClusteredPoints(rng, n, 2 + rng() % 6);
    const double tau = static_cast<double>(rng() % 100) / 100.0;
    const auto c = AhcCluster(x, AhcConfig::Threshold(tau));
    CHECK(c.assignment == testing::BruteForceAhc(x, false, tau, 0));
    // Monotone dendrogram.
    for (std::size_t i = 1; i < c.merge_distances.size(); ++i) {
      CHECK(c.merge_distances[i] >= c.merge_distances[i - 1] - 1e-12);
    }
    for (std::size_t k = 1; k <= n; ++k) {
      const auto o = AhcCluster(x, AhcConfig::Oracle(k));
      CHECK(o.num_clusters == static_cast<int>(k));
      CHECK(o.assignment == testing::BruteForceAhc(x, true, 0, k));
    }
  }
}

TEST_CASE("speaker masks from clusters") {
  Clustering c;
  c.assignment = {0};
  c.num_clusters = 1;
  auto m = BuildSpeakerMasks(c, {0.75}, 300, 0.01);
  REQUIRE(m.num_speakers() == 1);
  for (std::size_t t = 0; t < 300; ++t) CHECK(m.mask(0, t) == (t < 150 ? 1.0 : 0.0));

  c.assignment = {0, 1, 0, 0};
  c.num_clusters = 2;
  auto m2 = BuildSpeakerMasks(c, {0.75, 1.5, 2.25, 3.0}, 400, 0.01);
  CHECK(m2.num_speakers() == 2);
  CHECK(m2.speakers[1] == "cluster1");
  // Windows 2 and 3 are adjacent in cluster 0: frames 150..374 covered.
  for (std::size_t t = 150; t < 375; ++t) CHECK(m2.mask(0, t) == 1.0);
  CHECK(m2.mask(0, 375) == 0.0);
  for (std::size_t t = 75; t < 225; ++t) CHECK(m2.mask(1, t) == 1.0);
  CHECK(m2.mask(1, 74) == 0.0);
}

TEST_CASE("threshold calibration picks the separating value") {
  AhcCalibrationItem item;
  item.total_frames = 600;
  item.truth = {{"r", "a", 0.0, 3.0}, {"r", "b", 3.0, 3.0}};
  for (int i = 0; i < 7; ++i) {
    WindowEmbedding w;
    w.center_s = 0.75 + 0.75 * i;
    w.rep.vector = w.center_s < 3.0 ? std::vector<double>{1, 0.1 * i} : std::vector<double>{-0.1 * i, 1};
    item.windows.push_back(w);
  }
  const double tau = CalibrateThreshold({item}, {0.0001, 0.5, 1.9});
  CHECK(tau == 0.5);
}

}  // namespace
}  // namespace mtead
