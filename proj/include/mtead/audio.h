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

#ifndef MTEAD_AUDIO_H_
#define MTEAD_AUDIO_H_

#include <string>
#include <vector>

namespace mtead {

constexpr int kDefaultSampleRate = 8000;

struct AudioSignal {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = kDefaultSampleRate;

  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

// Reads a RIFF/WAVE file holding 16-bit little-endian PCM, mono, 8 kHz.
// Anything else is rejected with a FormatError that says what was found.
AudioSignal ReadWav(const std::string &path);
AudioSignal ParseWav(const std::string &bytes);

// Writes 16-bit PCM; samples are clipped to [-1, 1].
void WriteWav(const std::string &path, const AudioSignal &audio);
std::string SerializeWav(const AudioSignal &audio);

}  // namespace mtead

#endif  // MTEAD_AUDIO_H_
