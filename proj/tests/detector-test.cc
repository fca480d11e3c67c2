#include <cmath>
#include <random>

#include "detector-cases.h"
#include "doctest.h"
#include "mtead/detector.h"
#include "mtead/error.h"
#include "mtead/ops.h"

namespace mtead {
namespace {

// The GEMM kernels round a row differently depending on its position in the
// batch, so per-speaker results agree to the last few bits only.
constexpr double kBatchTol = 1e-13;

double MaxAbsDiff(const Tensor &a, const Tensor &b) {
  REQUIRE(a.dims() == b.dims());
  double m = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Tensor Random(Shape dims, Rng *rng) {
  Tensor t(std::move(dims));
  FillNormal(&t, 0, 1, rng);
  return t;
}

DetectorConfig SmallConfig() {
  DetectorConfig c;
  c.cnn_channels = 8;
  c.model_dim = 8;
  c.hidden = 6;
  c.chunk_frames = 0;
  return c;
}

TEST_CASE("cnn frontend") {
  Rng rng(1);
  ParameterSet params;
  auto det = Detector::Create(&params, "det", SmallConfig(), &rng);
  Tensor feats = Random({37, 20}, &rng);
  CHECK(det.Frontend(nullptr, feats).dims() == Shape{37, 8});

  for (const auto &[name, t] : params.items()) {
    if (name.rfind("det.cnn", 0) == 0) {
      Tensor w = t;
      std::fill(w.data().begin(), w.data().end(), 0.0);
    }
  }
  const Tensor zero_out = det.Frontend(nullptr, feats);
  for (double v : zero_out.data()) CHECK(v == 0.0);

  // Delta kernel: centre tap maps input channel c to output channel c.
  DetectorConfig one = SmallConfig();
  one.cnn_layers = 1;
  ParameterSet p1;
  auto d1 = Detector::Create(&p1, "det", one, &rng);
  Tensor w = p1.Get("det.cnn0.weight");
  Tensor b = p1.Get("det.cnn0.bias");
  std::fill(w.data().begin(), w.data().end(), 0.0);
  std::fill(b.data().begin(), b.data().end(), 0.0);
  const std::size_t centre = 2;
  for (std::size_t c = 0; c < 8; ++c) w.at(centre * 20 + c, c) = 1.0;
  Tensor pos({10, 20});
  FillUniform(&pos, 0.1, 1.0, &rng);
  Tensor out = d1.Frontend(nullptr, pos);
  for (std::size_t t = 0; t < 10; ++t) {
    for (std::size_t c = 0; c < 8; ++c) CHECK(out.at(t, c) == pos.at(t, c));
  }
}

TEST_CASE("feature mixer is per speaker") {
  Rng rng(2);
  ParameterSet params;
  auto det = Detector::Create(&params, "det", SmallConfig(), &rng);
  Tensor fe = det.Frontend(nullptr, Random({15, 20}, &rng));
  Tensor r1 = Random({1, 40}, &rng);
  CHECK(det.Mix(nullptr, fe, r1).dims() == Shape{15, 1, 8});

  Tensor same({2, 40});
  for (std::size_t i = 0; i < 40; ++i) same.at(0, i) = same.at(1, i) = r1.at(0, i);
  Tensor x = det.Mix(nullptr, fe, same);
  for (std::size_t t = 0; t < 15; ++t) {
    for (std::size_t d = 0; d < 8; ++d) {
      CHECK(std::abs(x.data()[(t * 2 + 0) * 8 + d] - x.data()[(t * 2 + 1) * 8 + d]) < kBatchTol);
    }
  }

  Tensor reps = Random({3, 40}, &rng);
  Tensor swapped({3, 40});
  const int order[3] = {2, 0, 1};
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 40; ++k) swapped.at(i, k) = reps.at(order[i], k);
  }
  Tensor a = det.Mix(nullptr, fe, reps), s = det.Mix(nullptr, fe, swapped);
  for (std::size_t t = 0; t < 15; ++t) {
    for (int i = 0; i < 3; ++i) {
      for (std::size_t d = 0; d < 8; ++d) {
        CHECK(std::abs(s.data()[(t * 3 + i) * 8 + d] - a.data()[(t * 3 + order[i]) * 8 + d]) < kBatchTol);
      }
    }
  }
  CHECK_THROWS_AS(det.Mix(nullptr, fe, Random({2, 39}, &rng)), DataError);
}

TEST_CASE("contextualizers are the identity at initialization") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + rng() % 9, t = 1 + rng() % 30, n = 1 + rng() % 5;
    ParameterSet params;
    auto b = TimeSpeakerBlock::Create(&params, "blk", d, 1 + rng() % 6, &rng);
    Tensor x = Random({t, n, d}, &rng);
    CHECK(MaxAbsDiff(b.TimeStage(nullptr, x), x) < 1e-12);
    CHECK(MaxAbsDiff(b.SpeakerStage(nullptr, x), x) < 1e-12);
    CHECK(MaxAbsDiff(b.Forward(nullptr, x), x) < 1e-12);
  }
  ParameterSet params;
  auto det = Detector::Create(&params, "det", SmallConfig(), &rng);
  Tensor x = Random({20, 4, 8}, &rng);
  CHECK(MaxAbsDiff(det.Contextualize(nullptr, x), x) < 1e-12);
}

TEST_CASE("contextualizer shapes with trained-like weights") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + rng() % 9, t = 1 + rng() % 30, n = 1 + rng() % 5;
    ParameterSet params;
    auto b = TimeSpeakerBlock::Create(&params, "blk", d, 4, &rng);
    for (const auto &[name, p] : params.items()) {
      Tensor w = p;
      FillUniform(&w, -0.3, 0.3, &rng);
    }
    Tensor x = Random({t, n, d}, &rng);
    Tensor y = b.Forward(nullptr, x);
    CHECK(y.dims() == x.dims());
    CHECK(MaxAbsDiff(y, x) > 0);
  }
}

TEST_CASE("speaker stage mixes across speakers only") {
  // With a one-speaker input the speaker stage sees length-1 sequences, so
  // each frame is processed on its own; permuting frames permutes outputs.
  Rng rng(5);
  ParameterSet params;
  auto b = TimeSpeakerBlock::Create(&params, "blk", 4, 3, &rng);
  for (const auto &[name, p] : params.items()) {
    Tensor w = p;
    FillUniform(&w, -0.5, 0.5, &rng);
  }
  Tensor x = Random({6, 1, 4}, &rng);
  Tensor y = b.SpeakerStage(nullptr, x);
  Tensor xr({6, 1, 4});
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t k = 0; k < 4; ++k) xr.data()[t * 4 + k] = x.data()[(5 - t) * 4 + k];
  }
  Tensor yr = b.SpeakerStage(nullptr, xr);
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(yr.data()[t * 4 + k] - y.data()[(5 - t) * 4 + k]) < kBatchTol);
  }
}

TEST_CASE("detect handles any number of speakers") {
  Rng rng(6);
  ParameterSet params;
  auto det = Detector::Create(&params, "det", SmallConfig(), &rng);
  FeatureSequence feats;
  feats.frames = Matrix(40, 20);
  for (auto &v : feats.frames.data()) v = std::normal_distribution<double>()(rng);
  for (std::size_t n = 1; n <= 7; ++n) {
    std::vector<SpeakerRep> reps;
    for (std::size_t i = 0; i < n; ++i) {
      SpeakerRep r;
      r.speaker_id = "s" + std::to_string(i);
      r.vector.resize(40);
      for (double &v : r.vector) v = std::normal_distribution<double>()(rng);
      reps.push_back(r);
    }
    auto out = Detect(feats, reps, det);
    CHECK(out.posteriors.rows() == 40);
    CHECK(out.posteriors.cols() == n);
    for (double p : out.posteriors.data()) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
  std::vector<SpeakerRep> bad(1);
  bad[0].vector.resize(39);
  CHECK_THROWS_AS(Detect(feats, bad, det), DataError);
  CHECK_THROWS_AS(Detect(feats, {}, det), DataError);

  Tensor hw = params.Get("det.head.weight"), hb = params.Get("det.head.bias");
  std::fill(hw.data().begin(), hw.data().end(), 0.0);
  std::fill(hb.data().begin(), hb.data().end(), 0.0);
  std::vector<SpeakerRep> two(2);
  for (auto &r : two) r.vector.assign(40, 0.3);
  const auto half = Detect(feats, two, det);
  for (double p : half.posteriors.data()) CHECK(p == 0.5);
}

TEST_CASE("chunked inference stitches chunks") {
  Rng rng(7);
  ParameterSet params;
  DetectorConfig cfg = SmallConfig();
  cfg.chunk_frames = 16;
  auto det = Detector::Create(&params, "det", cfg, &rng);
  FeatureSequence feats;
  feats.frames = Matrix(40, 20);
  for (auto &v : feats.frames.data()) v = std::normal_distribution<double>()(rng);
  std::vector<SpeakerRep> reps(2);
  for (auto &r : reps) {
    r.vector.resize(40);
    for (double &v : r.vector) v = std::normal_distribution<double>()(rng);
  }
  auto out = Detect(feats, reps, det);
  // Chunks cover [0,16), [16,32) and, aligned to the end, [24,40).
  auto run = [&](std::size_t start) {
    Matrix piece(16, 20);
    for (std::size_t t = 0; t < 16; ++t) {
      for (std::size_t c = 0; c < 20; ++c) piece(t, c) = feats.frames(start + t, c);
    }
    return det.Forward(nullptr, MatrixToTensor(piece), StackReps(reps));
  };
  const Tensor a = run(0), b = run(16), c = run(24);
  for (std::size_t n = 0; n < 2; ++n) {
    CHECK(out.posteriors(5, n) == a.at(5, n));
    CHECK(out.posteriors(20, n) == b.at(4, n));
    CHECK(out.posteriors(31, n) == b.at(15, n));
    CHECK(out.posteriors(32, n) == c.at(8, n));
    CHECK(out.posteriors(39, n) == c.at(15, n));
  }
}

TEST_CASE("subsampled frontend keeps the output frame rate") {
  Rng rng(8);
  ParameterSet params;
  DetectorConfig cfg = SmallConfig();
  cfg.cnn_stride = 2;
  auto det = Detector::Create(&params, "det", cfg, &rng);
  Tensor feats = Random({13, 20}, &rng);
  Tensor p = det.Forward(nullptr, feats, Random({2, 40}, &rng));
  REQUIRE(p.dims() == Shape{13, 2});
  CHECK(p.at(0, 1) == p.at(1, 1));
  CHECK(p.at(10, 0) == p.at(11, 0));
}

TEST_CASE("posteriors to rttm") {
  DetectorOutput out;
  out.speakers = {"a", "b"};
  out.posteriors = Matrix(50, 2, 0.9);
  auto full = PosteriorsToRttm(out, "r");
  REQUIRE(full.size() == 2);
  CHECK(full[0].onset_s == 0.0);
  CHECK(full[0].duration_s == doctest::Approx(0.5));

  out.posteriors = Matrix(50, 2, 0.1);
  CHECK(PosteriorsToRttm(out, "r").empty());
  out.posteriors(25, 0) = 0.9;
  CHECK(PosteriorsToRttm(out, "r").empty());
  CHECK(PosteriorsToRttm(out, "r", 0.5, 1).size() == 1);
  CHECK_THROWS_AS(PosteriorsToRttm(out, "r", 0.5, 10), ConfigError);

  const std::vector<double> x = {5, 1, 2, 9, 3};
  CHECK(MedianFilter(x, 3) == std::vector<double>{5, 2, 2, 3, 3});
}

TEST_CASE("end-to-end detector gradients") {
  for (std::uint64_t seed : {1, 2}) {
    const auto res = testing::DetectorEndToEndGradCheck(seed);
    CHECK(res.max_rel_error < 1e-4);
  }
}

TEST_CASE("extractor and detector train jointly") {
  Rng rng(9);
  ParameterSet ext_params, det_params;
  ExtractorConfig ecfg;
  ecfg.channels = {4, 4, 8, 8};
  ecfg.attention_dim = 4;
  ecfg.fit_frames = 40;
  auto ext = ZExtractor::Create(&ext_params, "ext", ecfg, &rng);
  auto det = Detector::Create(&det_params, "det", SmallConfig(), &rng);
  Matrix feats(30, 20);
  for (auto &v : feats.data()) v = std::normal_distribution<double>()(rng);
  std::vector<double> m0(30, 0.0), m1(30, 0.0);
  for (std::size_t t = 0; t < 30; ++t) (t < 18 ? m0 : m1)[t] = 1.0;
  Tensor labels({30, 2});
  for (std::size_t t = 0; t < 30; ++t) labels.at(t, t < 18 ? 0 : 1) = 1.0;
  Graph g;
  Tensor reps = ConcatRows(&g, {ext.Embed(&g, feats, m0, "a"), ext.Embed(&g, feats, m1, "b")});
  g.Backward(BinaryCrossEntropy(&g, det.Forward(&g, MatrixToTensor(feats), reps), labels));
  for (const auto *ps : {&ext_params, &det_params}) {
    for (const auto &[name, t] : ps->items()) CHECK_MESSAGE(t.has_grad(), name);
  }
}

}  // namespace
}  // namespace mtead
