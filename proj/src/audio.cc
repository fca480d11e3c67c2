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

#include "mtead/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mtead/error.h"

namespace mtead {
namespace {

std::uint32_t ReadU32(const std::string &b, std::size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24;
}

std::uint16_t ReadU16(const std::string &b, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    static_cast<unsigned char>(b[off + 1]) << 8);
}

void PutU32(std::string *b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string *b, std::uint16_t v) {
  b->push_back(static_cast<char>(v & 0xff));
  b->push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioSignal ParseWav(const std::string &b) {
  if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0) {
    throw FormatError("wav: not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::size_t off = 12;
  while (off + 8 <= b.size()) {
    const std::string id = b.substr(off, 4);
    const std::uint32_t size = ReadU32(b, off + 4);
    const std::size_t body = off + 8;
    if (body + size > b.size()) throw FormatError("wav: chunk '" + id + "' is truncated");
    if (id == "fmt ") {
      if (size < 16) throw FormatError("wav: fmt chunk too short");
      const auto format = ReadU16(b, body);
      const auto channels = ReadU16(b, body + 2);
      const auto rate = ReadU32(b, body + 4);
      const auto bits = ReadU16(b, body + 14);
      if (format != 1) throw FormatError("wav: only PCM is supported, format tag " + std::to_string(format));
      if (channels != 1) throw FormatError("wav: expected mono, got " + std::to_string(channels) + " channels");
      if (rate != kDefaultSampleRate) {
        throw FormatError("wav: expected 8000 Hz, got " + std::to_string(rate) + " Hz");
      }
      if (bits != 16) throw FormatError("wav: expected 16-bit samples, got " + std::to_string(bits));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      AudioSignal audio;
      audio.sample_rate = kDefaultSampleRate;
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(b, body + 2 * i));
        audio.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return audio;
    }
    off = body + size + (size & 1);
  }
  throw FormatError("wav: no data chunk");
}

AudioSignal ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ParseWav(ss.str());
  } catch (const FormatError &e) {
    throw FormatError(std::string(e.what()) + " (" + path + ")");
  }
}

std::string SerializeWav(const AudioSignal &audio) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  PutU32(&b, 36 + data_bytes);
  b += "WAVEfmt ";
  PutU32(&b, 16);
  PutU16(&b, 1);
  PutU16(&b, 1);
  PutU32(&b, static_cast<std::uint32_t>(audio.sample_rate));
  PutU32(&b, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  PutU16(&b, 2);
  PutU16(&b, 16);
  b += "data";
  PutU32(&b, data_bytes);
  for (double s : audio.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(c * 32767.0));
    PutU16(&b, static_cast<std::uint16_t>(v));
  }
  return b;
}

void WriteWav(const std::string &path, const AudioSignal &audio) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("wav: cannot write " + path);
  const std::string b = SerializeWav(audio);
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
}

}  // namespace mtead
