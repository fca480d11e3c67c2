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

#ifndef MTEAD_MFCC_H_
#define MTEAD_MFCC_H_

#include <complex>
#include <cstddef>
#include <vector>

#include "mtead/audio.h"
#include "mtead/matrix.h"

namespace mtead {

// T x F frame matrix with frame timing. Frame t covers
// [t * shift, t * shift + length) seconds of the source audio.
struct FeatureSequence {
  Matrix frames;
  double frame_shift_s = 0.010;
  double frame_length_s = 0.025;

  std::size_t num_frames() const { return frames.rows(); }
  std::size_t dim() const { return frames.cols(); }
};

struct MfccConfig {
  double frame_length_s = 0.025;
  double frame_shift_s = 0.010;
  double preemphasis = 0.97;
  std::size_t num_mel_bins = 23;
  std::size_t num_ceps = 20;
  double low_freq_hz = 20.0;
  double high_freq_hz = 0.0;  // <= 0 means Nyquist
  double log_floor = 1e-10;
};

// Frames of `win` samples every `hop` samples, each multiplied by a Hamming
// window. Returns floor((len - win) / hop) + 1 frames, or none if len < win.
std::vector<std::vector<double>> FrameSignal(const AudioSignal &audio, std::size_t win,
                                             std::size_t hop);

std::vector<double> HammingWindow(std::size_t n);

// In-place radix-2 FFT; size must be a power of two.
void Fft(std::vector<std::complex<double>> *x);

// |DFT|^2 of `frame` zero-padded to `fft_size`; returns fft_size / 2 + 1 bins.
std::vector<double> PowerSpectrum(const std::vector<double> &frame, std::size_t fft_size);

// Triangular mel filters (peak 1) over power-spectrum bins. Row j is filter j.
Matrix MelFilterbank(std::size_t num_bins, std::size_t fft_size, int sample_rate, double low_hz,
                     double high_hz);
// Centre frequency in Hz of every mel filter.
std::vector<double> MelCenterFrequencies(std::size_t num_bins, double low_hz, double high_hz);

// Orthonormal DCT-II basis, n x n; row k is basis function k.
Matrix DctMatrix(std::size_t n);

std::size_t NextPowerOfTwo(std::size_t n);

// Log mel energies per frame (T x num_mel_bins), before the DCT.
Matrix LogMelEnergies(const AudioSignal &audio, const MfccConfig &config = {});

// MFCCs: pre-emphasis, Hamming, power spectrum, mel bank, log, DCT-II.
// Throws DataError on empty audio.
FeatureSequence Mfcc(const AudioSignal &audio, const MfccConfig &config = {});

// Per-column mean and variance normalization (variance floor 1e-8).
// Throws DataError when fewer than two frames are given.
FeatureSequence Cmvn(const FeatureSequence &feats);

}  // namespace mtead

#endif  // MTEAD_MFCC_H_
