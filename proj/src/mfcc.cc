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

#include "mtead/mfcc.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtead/error.h"

namespace mtead {
namespace {

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

std::size_t Samples(double seconds, int rate) {
  return static_cast<std::size_t>(std::lround(seconds * rate));
}

// Raw (unwindowed) frames.
std::vector<std::vector<double>> CutFrames(const std::vector<double> &x, std::size_t win,
                                           std::size_t hop) {
  std::vector<std::vector<double>> frames;
  if (x.size() < win) return frames;
  const std::size_t n = (x.size() - win) / hop + 1;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    frames.emplace_back(x.begin() + i * hop, x.begin() + i * hop + win);
  }
  return frames;
}

}  // namespace

std::vector<double> HammingWindow(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(n - 1));
  }
  return w;
}

std::vector<std::vector<double>> FrameSignal(const AudioSignal &audio, std::size_t win,
                                             std::size_t hop) {
  if (hop == 0 || win < hop) throw ConfigError("frame_signal: need win >= hop >= 1");
  auto frames = CutFrames(audio.samples, win, hop);
  const auto w = HammingWindow(win);
  for (auto &f : frames) {
    for (std::size_t i = 0; i < win; ++i) f[i] *= w[i];
  }
  return frames;
}

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void Fft(std::vector<std::complex<double>> *xp) {
  auto &x = *xp;
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = x[i + k];
        const auto v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<double> PowerSpectrum(const std::vector<double> &frame, std::size_t fft_size) {
  std::vector<std::complex<double>> buf(fft_size);
  for (std::size_t i = 0; i < std::min(frame.size(), fft_size); ++i) buf[i] = frame[i];
  Fft(&buf);
  std::vector<double> p(fft_size / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(buf[k]);
  return p;
}

std::vector<double> MelCenterFrequencies(std::size_t num_bins, double low_hz, double high_hz) {
  const double lo = HzToMel(low_hz), hi = HzToMel(high_hz);
  const double step = (hi - lo) / static_cast<double>(num_bins + 1);
  std::vector<double> c(num_bins);
  for (std::size_t j = 0; j < num_bins; ++j) {
    const double mel = lo + step * static_cast<double>(j + 1);
    c[j] = 700.0 * (std::exp(mel / 1127.0) - 1.0);
  }
  return c;
}

Matrix MelFilterbank(std::size_t num_bins, std::size_t fft_size, int sample_rate, double low_hz,
                     double high_hz) {
  if (high_hz <= 0) high_hz = sample_rate / 2.0;
  if (!(low_hz >= 0 && low_hz < high_hz && high_hz <= sample_rate / 2.0)) {
    throw ConfigError("mel filterbank: bad frequency range");
  }
  const double lo = HzToMel(low_hz), hi = HzToMel(high_hz);
  const double step = (hi - lo) / static_cast<double>(num_bins + 1);
  const std::size_t num_fft_bins = fft_size / 2 + 1;
  Matrix bank(num_bins, num_fft_bins);
  for (std::size_t j = 0; j < num_bins; ++j) {
    const double left = lo + step * static_cast<double>(j);
    const double center = left + step;
    const double right = center + step;
    for (std::size_t k = 0; k < num_fft_bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate / static_cast<double>(fft_size));
      double w = 0;
      if (mel > left && mel <= center) {
        w = (mel - left) / (center - left);
      } else if (mel > center && mel < right) {
        w = (right - mel) / (right - center);
      }
      bank(j, k) = w;
    }
  }
  return bank;
}

Matrix DctMatrix(std::size_t n) {
  Matrix d(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      d(k, i) = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                 (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
  }
  return d;
}

Matrix LogMelEnergies(const AudioSignal &audio, const MfccConfig &config) {
  if (audio.samples.empty()) throw DataError("mfcc: empty audio");
  const std::size_t win = Samples(config.frame_length_s, audio.sample_rate);
  const std::size_t hop = Samples(config.frame_shift_s, audio.sample_rate);
  if (hop == 0 || win < hop) throw ConfigError("mfcc: need frame length >= frame shift > 0");
  const std::size_t fft_size = NextPowerOfTwo(win);
  const Matrix bank = MelFilterbank(config.num_mel_bins, fft_size, audio.sample_rate,
                                    config.low_freq_hz, config.high_freq_hz);
  const auto window = HammingWindow(win);
  auto frames = CutFrames(audio.samples, win, hop);
  Matrix out(frames.size(), config.num_mel_bins);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    auto &f = frames[t];
    for (std::size_t i = win; i-- > 1;) f[i] -= config.preemphasis * f[i - 1];
    f[0] -= config.preemphasis * f[0];
    for (std::size_t i = 0; i < win; ++i) f[i] *= window[i];
    const auto power = PowerSpectrum(f, fft_size);
    for (std::size_t j = 0; j < config.num_mel_bins; ++j) {
      double e = 0;
      for (std::size_t k = 0; k < power.size(); ++k) e += bank(j, k) * power[k];
      out(t, j) = std::log(e + config.log_floor);
    }
  }
  return out;
}

FeatureSequence Mfcc(const AudioSignal &audio, const MfccConfig &config) {
  if (config.num_ceps > config.num_mel_bins) {
    throw ConfigError("mfcc: num_ceps exceeds num_mel_bins");
  }
  const Matrix logmel = LogMelEnergies(audio, config);
  const Matrix dct = DctMatrix(config.num_mel_bins);
  FeatureSequence fs;
  fs.frame_shift_s = config.frame_shift_s;
  fs.frame_length_s = config.frame_length_s;
  fs.frames = Matrix(logmel.rows(), config.num_ceps);
  for (std::size_t t = 0; t < logmel.rows(); ++t) {
    for (std::size_t k = 0; k < config.num_ceps; ++k) {
      double acc = 0;
      for (std::size_t j = 0; j < config.num_mel_bins; ++j) acc += dct(k, j) * logmel(t, j);
      fs.frames(t, k) = acc;
    }
  }
  return fs;
}

FeatureSequence Cmvn(const FeatureSequence &feats) {
  const std::size_t t_len = feats.num_frames(), dim = feats.dim();
  if (t_len < 2) throw DataError("cmvn: need at least 2 frames, got " + std::to_string(t_len));
  FeatureSequence out = feats;
  for (std::size_t j = 0; j < dim; ++j) {
    double mean = 0;
    for (std::size_t t = 0; t < t_len; ++t) mean += feats.frames(t, j);
    mean /= static_cast<double>(t_len);
    double var = 0;
    for (std::size_t t = 0; t < t_len; ++t) {
      const double d = feats.frames(t, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(t_len);
    const double inv = 1.0 / std::sqrt(std::max(var, 1e-8));
    for (std::size_t t = 0; t < t_len; ++t) out.frames(t, j) = (feats.frames(t, j) - mean) * inv;
  }
  return out;
}

}  // namespace mtead
