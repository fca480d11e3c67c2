#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mtead/audio.h"
#include "mtead/error.h"
#include "mtead/fmat.h"
#include "mtead/mfcc.h"

namespace mtead {
namespace {

AudioSignal Sine(double hz, double seconds, double amp = 0.5) {
  AudioSignal a;
  a.samples.resize(static_cast<std::size_t>(seconds * a.sample_rate));
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    a.samples[i] = amp * std::sin(2 * std::numbers::pi * hz * i / a.sample_rate);
  }
  return a;
}

TEST_CASE("frame_signal") {
  AudioSignal a;
  a.samples.assign(8000, 0.25);
  auto frames = FrameSignal(a, 200, 80);
  CHECK(frames.size() == 98);
  const auto w = HammingWindow(200);
  for (std::size_t i = 0; i < 200; ++i) CHECK(frames[5][i] == doctest::Approx(0.25 * w[i]));

  AudioSignal shortsig;
  shortsig.samples.assign(150, 1.0);
  CHECK(FrameSignal(shortsig, 200, 80).empty());

  std::mt19937 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t hop = 1 + rng() % 50;
    const std::size_t win = hop + rng() % 100;
    AudioSignal s;
    s.samples.assign(rng() % 1000, 0.0);
    const std::size_t expect = s.samples.size() < win ? 0 : (s.samples.size() - win) / hop + 1;
    REQUIRE(FrameSignal(s, win, hop).size() == expect);
  }
  CHECK_THROWS_AS(FrameSignal(a, 10, 20), ConfigError);
}

TEST_CASE("fft matches a direct DFT") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<std::complex<double>> x(64);
  for (auto &v : x) v = {u(rng), u(rng)};
  auto fast = x;
  Fft(&fast);
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::complex<double> acc = 0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      acc += x[n] * std::polar(1.0, -2 * std::numbers::pi * k * n / x.size());
    }
    CHECK(std::abs(acc - fast[k]) < 1e-10);
  }
}

TEST_CASE("1 kHz tone peaks in the mel filter centred nearest 1 kHz") {
  const auto logmel = LogMelEnergies(Sine(1000, 0.5));
  const auto centers = MelCenterFrequencies(23, 20, 4000);
  std::size_t nearest = 0;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    if (std::abs(centers[j] - 1000) < std::abs(centers[nearest] - 1000)) nearest = j;
  }
  for (std::size_t t = 0; t < logmel.rows(); ++t) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < logmel.cols(); ++j) {
      if (logmel(t, j) > logmel(t, best)) best = j;
    }
    REQUIRE(best == nearest);
  }
}

TEST_CASE("mfcc") {
  AudioSignal silence;
  silence.samples.assign(4000, 0.0);
  auto f = Mfcc(silence);
  CHECK(f.num_frames() == 48);
  CHECK(f.dim() == 20);
  for (std::size_t t = 1; t < f.num_frames(); ++t) {
    for (std::size_t k = 0; k < f.dim(); ++k) REQUIRE(f.frames(t, k) == f.frames(0, k));
  }
  // log(1e-10) everywhere is a constant log-mel vector: only c0 is non-zero.
  CHECK(std::abs(f.frames(0, 0)) > 1.0);
  for (std::size_t k = 1; k < f.dim(); ++k) CHECK(std::abs(f.frames(0, k)) < 1e-9);

  CHECK_THROWS_AS(Mfcc(AudioSignal{}), DataError);
}

TEST_CASE("dct basis is orthonormal") {
  const Matrix d = DctMatrix(23);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> x(23), y(23, 0.0), z(23, 0.0);
  for (auto &v : x) v = u(rng);
  for (std::size_t k = 0; k < 23; ++k) {
    for (std::size_t i = 0; i < 23; ++i) y[k] += d(k, i) * x[i];
  }
  for (std::size_t i = 0; i < 23; ++i) {
    for (std::size_t k = 0; k < 23; ++k) z[i] += d(k, i) * y[k];
  }
  for (std::size_t i = 0; i < 23; ++i) CHECK(std::abs(z[i] - x[i]) < 1e-9);
}

TEST_CASE("mel filterbank rows are non-negative triangles") {
  const Matrix bank = MelFilterbank(23, 256, 8000, 20, 4000);
  for (std::size_t k = 0; k < bank.cols(); ++k) {
    double total = 0;
    for (std::size_t j = 0; j < bank.rows(); ++j) {
      REQUIRE(bank(j, k) >= 0.0);
      total += bank(j, k);
    }
    REQUIRE(total <= 1.0 + 1e-9);
  }
  for (std::size_t j = 0; j < bank.rows(); ++j) {
    double row = 0;
    for (std::size_t k = 0; k < bank.cols(); ++k) row += bank(j, k);
    CHECK(row > 0.0);
  }
}

TEST_CASE("cmvn") {
  FeatureSequence fs;
  fs.frames = Matrix(50, 3);
  std::mt19937 rng(3);
  std::normal_distribution<double> n(2.0, 3.0);
  for (std::size_t t = 0; t < 50; ++t) {
    fs.frames(t, 0) = n(rng);
    fs.frames(t, 1) = 7.25;
    fs.frames(t, 2) = n(rng) * 100;
  }
  auto out = Cmvn(fs);
  for (std::size_t j : {0u, 2u}) {
    double mean = 0, var = 0;
    for (std::size_t t = 0; t < 50; ++t) mean += out.frames(t, j);
    mean /= 50;
    for (std::size_t t = 0; t < 50; ++t) var += (out.frames(t, j) - mean) * (out.frames(t, j) - mean);
    var /= 50;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(var - 1) < 1e-6);
  }
  for (std::size_t t = 0; t < 50; ++t) CHECK(std::abs(out.frames(t, 1)) < 1e-9);
  FeatureSequence one;
  one.frames = Matrix(1, 3);
  CHECK_THROWS_AS(Cmvn(one), DataError);
}

TEST_CASE("wav round trip and format checks") {
  AudioSignal a = Sine(440, 0.1);
  AudioSignal b = ParseWav(SerializeWav(a));
  REQUIRE(b.samples.size() == a.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(std::abs(a.samples[i] - b.samples[i]) < 1e-4);

  std::string stereo = SerializeWav(a);
  stereo[22] = 2;
  CHECK_THROWS_WITH_AS(ParseWav(stereo), doctest::Contains("mono"), FormatError);
  std::string rate = SerializeWav(a);
  rate[24] = 0x44;
  rate[25] = static_cast<char>(0xac);
  CHECK_THROWS_WITH_AS(ParseWav(rate), doctest::Contains("8000"), FormatError);
  CHECK_THROWS_AS(ParseWav("RIFF"), FormatError);
}

TEST_CASE("fmat round trip is bit exact") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(rng() % 7, rng() % 5 + 1);
    for (auto &v : m.data()) v = u(rng);
    REQUIRE(ParseFmat(SerializeFmat(m)) == m);
  }
  Matrix m(2, 2, 1.5);
  std::string b = SerializeFmat(m);
  CHECK_THROWS_AS(ParseFmat(b.substr(0, b.size() - 3)), FormatError);
  b[0] = 'X';
  CHECK_THROWS_AS(ParseFmat(b), FormatError);
}

}  // namespace
}  // namespace mtead
