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

#include "mtead/simulator.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "mtead/error.h"

namespace mtead {
namespace {

constexpr double kPeak = 0.5;
constexpr double kFadeS = 0.020;
constexpr int kMaxHarmonics = 64;

double Normal(Rng *rng) {
  // Box-Muller on portable uniforms.
  const double u1 = 1.0 - Uniform01(rng);
  const double u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

std::int64_t ToMs(double s) { return static_cast<std::int64_t>(std::llround(s * 1000.0)); }

}  // namespace

double Uniform01(Rng *rng) { return static_cast<double>((*rng)() >> 11) * 0x1.0p-53; }

double UniformIn(double lo, double hi, Rng *rng) { return lo + (hi - lo) * Uniform01(rng); }

double Exponential(double mean, Rng *rng) { return -mean * std::log1p(-Uniform01(rng)); }

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word.
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string SimSpeakerId(std::uint64_t session_seed, int index) {
  return "spk" + std::to_string(session_seed) + "-" + std::to_string(index);
}

SpeakerVoice MakeVoice(std::uint64_t session_seed, int index) {
  SpeakerVoice v;
  v.speaker_id = SimSpeakerId(session_seed, index);
  v.seed = MixSeed(session_seed, 0x5100 + static_cast<std::uint64_t>(index));
  Rng rng(v.seed);
  v.f0_hz = UniformIn(80, 300, &rng);
  v.noise_level = UniformIn(0.01, 0.1, &rng);
  // Three resonances over a spectral tilt give each voice its own envelope.
  const double formants[3] = {UniformIn(300, 900, &rng), UniformIn(900, 2400, &rng),
                              UniformIn(2400, 3600, &rng)};
  const double widths[3] = {UniformIn(80, 200, &rng), UniformIn(120, 300, &rng),
                            UniformIn(150, 400, &rng)};
  const double gains[3] = {1.0, UniformIn(0.2, 1.0, &rng), UniformIn(0.05, 0.6, &rng)};
  const double tilt = UniformIn(0.3, 1.2, &rng);
  v.harmonic_amplitudes.resize(kMaxHarmonics);
  for (int k = 0; k < kMaxHarmonics; ++k) {
    const double f = (k + 1) * v.f0_hz;
    double a = 0.05 * std::pow(k + 1.0, -tilt);
    for (int j = 0; j < 3; ++j) {
      const double d = (f - formants[j]) / widths[j];
      a += gains[j] * std::exp(-0.5 * d * d);
    }
    v.harmonic_amplitudes[k] = a;
  }
  return v;
}

std::optional<SpeakerVoice> VoiceFromSpeakerId(const std::string &speaker_id) {
  if (speaker_id.rfind("spk", 0) != 0) return std::nullopt;
  const auto dash = speaker_id.find('-', 3);
  if (dash == std::string::npos || dash == 3 || dash + 1 == speaker_id.size()) return std::nullopt;
  const std::string seed_str = speaker_id.substr(3, dash - 3);
  const std::string idx_str = speaker_id.substr(dash + 1);
  auto all_digits = [](const std::string &s) {
    return s.size() < 20 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(seed_str) || !all_digits(idx_str) || idx_str.size() > 6) return std::nullopt;
  return MakeVoice(std::stoull(seed_str), std::stoi(idx_str));
}

AudioSignal SynthSpeakerSignal(const SpeakerVoice &voice, double duration_s,
                               std::uint64_t variant, int sample_rate) {
  if (!(duration_s > 0)) throw ConfigError("synth: duration must be positive");
  AudioSignal out;
  out.sample_rate = sample_rate;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  out.samples.assign(std::max<std::size_t>(n, 1), 0.0);
  Rng rng(MixSeed(voice.seed, variant + 1));

  const double nyquist = sample_rate / 2.0;
  for (std::size_t k = 0; k < voice.harmonic_amplitudes.size(); ++k) {
    const double f = (k + 1) * voice.f0_hz;
    const double phase = 2 * std::numbers::pi * Uniform01(&rng);
    if (f >= nyquist) continue;
    const double a = voice.harmonic_amplitudes[k];
    // Phasor rotation; drift over a minute of audio is far below 1e-9.
    const double w = 2 * std::numbers::pi * f / sample_rate;
    const double cw = std::cos(w), sw = std::sin(w);
    double re = std::cos(phase), im = std::sin(phase);
    for (double &s : out.samples) {
      s += a * im;
      const double r2 = re * cw - im * sw;
      im = re * sw + im * cw;
      re = r2;
    }
  }
  double peak = 0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0) {
    for (double &s : out.samples) s /= peak;
  }
  if (voice.noise_level > 0) {
    for (double &s : out.samples) s += voice.noise_level * Normal(&rng);
  }

  const std::size_t fade = std::min(out.samples.size() / 2,
                                    static_cast<std::size_t>(std::llround(kFadeS * sample_rate)));
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / fade);
    out.samples[i] *= g;
    out.samples[out.samples.size() - 1 - i] *= g;
  }
  peak = 0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0) {
    for (double &s : out.samples) s *= kPeak / peak;
  }
  return out;
}

void SimConfig::Validate() const {
  if (num_speakers < 1) throw ConfigError("simulate: num_speakers must be >= 1");
  if (!(beta_s > 0)) throw ConfigError("simulate: beta must be positive");
  if (utterances_per_speaker < 1) throw ConfigError("simulate: utterances_per_speaker must be >= 1");
  if (!(utterance_min_s > 0) || !(utterance_max_s >= utterance_min_s)) {
    throw ConfigError("simulate: utterance length range must satisfy 0 < lo <= hi");
  }
  if (!(noise_floor >= 0)) throw ConfigError("simulate: noise_floor must be >= 0");
}

namespace {

// Utterances in generation order (speaker-major); the index doubles as the
// synthesis variant.
SegmentList GenerateUtterances(const SimConfig &config, const std::string &id) {
  config.Validate();
  SegmentList utts;
  for (int k = 0; k < config.num_speakers; ++k) {
    Rng rng(MixSeed(config.seed, 0x7100 + static_cast<std::uint64_t>(k)));
    const std::string speaker = SimSpeakerId(config.seed, k);
    double t = 0;
    for (int u = 0; u < config.utterances_per_speaker; ++u) {
      t += Exponential(config.beta_s, &rng);
      const double d = UniformIn(config.utterance_min_s, config.utterance_max_s, &rng);
      const std::int64_t onset = ToMs(t);
      const std::int64_t dur = std::max<std::int64_t>(1, ToMs(d));
      utts.push_back({id, speaker, onset / 1000.0, dur / 1000.0});
      t = static_cast<double>(onset + dur) / 1000.0;
    }
  }
  return utts;
}

std::string SessionId(const SimConfig &config, const std::string &session_id) {
  return session_id.empty() ? "sim" + std::to_string(config.seed) : session_id;
}

}  // namespace

SegmentList SimulateTruth(const SimConfig &config, const std::string &session_id) {
  auto truth = GenerateUtterances(config, SessionId(config, session_id));
  SortSegments(&truth);
  return truth;
}

Session SimulateSession(const SimConfig &config, const std::string &session_id) {
  Session session;
  session.config = config;
  session.id = SessionId(config, session_id);
  session.truth = GenerateUtterances(config, session.id);

  std::int64_t end_ms = 0;
  for (const auto &u : session.truth) end_ms = std::max(end_ms, ToMs(u.end_s()));
  end_ms += 500;

  const int sr = kDefaultSampleRate;
  const std::int64_t per_ms = sr / 1000;
  session.audio.sample_rate = sr;
  session.audio.samples.assign(static_cast<std::size_t>(end_ms * per_ms), 0.0);
  std::map<std::string, SpeakerVoice> voices;
  for (int k = 0; k < config.num_speakers; ++k) {
    auto v = MakeVoice(config.seed, k);
    voices.emplace(v.speaker_id, std::move(v));
  }
  for (std::size_t i = 0; i < session.truth.size(); ++i) {
    const auto &u = session.truth[i];
    const auto sig = SynthSpeakerSignal(voices.at(u.speaker), u.duration_s, i, sr);
    const auto start = static_cast<std::size_t>(ToMs(u.onset_s) * per_ms);
    for (std::size_t j = 0; j < sig.samples.size(); ++j) session.audio.samples[start + j] += sig.samples[j];
  }
  Rng noise_rng(MixSeed(config.seed, 0x9900));
  for (double &s : session.audio.samples) {
    s = std::clamp(s + config.noise_floor * Normal(&noise_rng), -1.0, 1.0);
  }
  SortSegments(&session.truth);
  return session;
}

double OverlapRatio(const SegmentList &truth) {
  if (truth.empty()) throw DataError("overlap_ratio: empty truth");
  std::int64_t end_ms = 0;
  for (const auto &s : truth) end_ms = std::max<std::int64_t>(end_ms, std::ceil(s.end_s() * 1000.0) + 1);
  std::vector<int> count(static_cast<std::size_t>(end_ms) + 1, 0);
  // Per speaker union, then a difference array over grid instants (k + 0.5) ms.
  std::map<std::string, std::vector<char>> active;
  for (const auto &s : truth) {
    auto &row = active[s.speaker];
    row.resize(count.size(), 0);
    const auto lo = static_cast<std::int64_t>(std::ceil(s.onset_s * 1000.0 - 0.5));
    for (std::int64_t k = std::max<std::int64_t>(0, lo); k < end_ms; ++k) {
      const double c = (k + 0.5) / 1000.0;
      if (c >= s.end_s()) break;
      if (c >= s.onset_s) row[k] = 1;
    }
  }
  for (const auto &[spk, row] : active) {
    for (std::size_t k = 0; k < row.size(); ++k) count[k] += row[k];
  }
  std::int64_t speech = 0, overlap = 0;
  for (int c : count) {
    speech += c >= 1;
    overlap += c >= 2;
  }
  return speech == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(speech);
}

void WriteManifest(const std::string &path, const std::vector<ManifestEntry> &entries) {
  std::ofstream out(path);
  if (!out) throw DataError("manifest: cannot write " + path);
  for (const auto &e : entries) {
    std::ostringstream beta;
    beta.precision(17);
    beta << e.beta_s;
    out << e.session_id << '\t' << e.wav_path << '\t' << e.rttm_path << '\t' << e.num_speakers
        << '\t' << beta.str() << '\t' << e.seed << '\n';
  }
}

std::vector<ManifestEntry> ReadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("manifest: cannot open " + path);
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string &p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() || base.empty() ? fp.string() : (base / fp).string();
  };
  std::vector<ManifestEntry> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, '\t')) f.push_back(tok);
    const std::string where = path + " line " + std::to_string(lineno);
    if (f.size() != 6) throw FormatError(where + ": expected 6 tab-separated fields");
    ManifestEntry e;
    e.session_id = f[0];
    e.wav_path = resolve(f[1]);
    e.rttm_path = resolve(f[2]);
    try {
      std::size_t used = 0;
      e.num_speakers = std::stoi(f[3], &used);
      if (used != f[3].size()) throw std::invalid_argument(f[3]);
      e.beta_s = std::stod(f[4], &used);
      if (used != f[4].size()) throw std::invalid_argument(f[4]);
      e.seed = std::stoull(f[5], &used);
      if (used != f[5].size()) throw std::invalid_argument(f[5]);
    } catch (const std::exception &) {
      throw FormatError(where + ": bad numeric field");
    }
    if (!ids.insert(e.session_id).second) throw FormatError(where + ": duplicate session id " + e.session_id);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace mtead
