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

#ifndef MTEAD_SIMULATOR_H_
#define MTEAD_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtead/audio.h"
#include "mtead/rttm.h"
#include "mtead/tensor.h"

namespace mtead {

// Uniform in [0, 1) from the top 53 bits; unlike std::uniform_real_distribution
// the result does not depend on the standard library.
double Uniform01(Rng *rng);
double UniformIn(double lo, double hi, Rng *rng);
double Exponential(double mean, Rng *rng);
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

struct SpeakerVoice {
  std::string speaker_id;
  double f0_hz = 120;
  std::vector<double> harmonic_amplitudes;  // harmonic k + 1 at (k + 1) * f0
  double noise_level = 0.05;
  std::uint64_t seed = 0;
};

// Deterministic voice for speaker `index` of the session simulated with
// `session_seed`. Its id is "spk<session_seed>-<index>".
SpeakerVoice MakeVoice(std::uint64_t session_seed, int index);
std::string SimSpeakerId(std::uint64_t session_seed, int index);
// Inverse of SimSpeakerId; nullopt for ids not produced by the simulator.
std::optional<SpeakerVoice> VoiceFromSpeakerId(const std::string &speaker_id);

// Harmonics below Nyquist plus white noise, 20 ms raised-cosine fades,
// peak-normalized to 0.5. `variant` picks independent phases and noise so
// that different utterances of one voice differ sample-wise.
AudioSignal SynthSpeakerSignal(const SpeakerVoice &voice, double duration_s,
                               std::uint64_t variant = 0,
                               int sample_rate = kDefaultSampleRate);

struct SimConfig {
  int num_speakers = 2;
  double beta_s = 3.0;
  int utterances_per_speaker = 10;
  double utterance_min_s = 1.0;
  double utterance_max_s = 4.0;
  double noise_floor = 1e-3;  // stddev of the session background noise
  std::uint64_t seed = 0;

  void Validate() const;
};

struct Session {
  std::string id;
  AudioSignal audio;
  SegmentList truth;
  SimConfig config;
};

// Each speaker gets its own chain gap, utterance, gap, utterance, ... with
// gaps ~ Exponential(mean beta); chains are summed and clipped to [-1, 1].
// Utterance boundaries sit on a 1 ms grid.
Session SimulateSession(const SimConfig &config, const std::string &session_id = "");
// The truth of SimulateSession without synthesizing audio.
SegmentList SimulateTruth(const SimConfig &config, const std::string &session_id = "");

// (time with >= 2 active speakers) / (time with >= 1), on a 1 ms grid.
double OverlapRatio(const SegmentList &truth);

struct ManifestEntry {
  std::string session_id;
  std::string wav_path;
  std::string rttm_path;
  int num_speakers = 0;
  double beta_s = 0;
  std::uint64_t seed = 0;
};

// Tab-separated: id, wav, rttm, N, beta, seed. Relative paths are resolved
// against the manifest's directory when reading.
void WriteManifest(const std::string &path, const std::vector<ManifestEntry> &entries);
std::vector<ManifestEntry> ReadManifest(const std::string &path);

}  // namespace mtead

#endif  // MTEAD_SIMULATOR_H_
