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

#include "mtead/checkpoint.h"

#include <zlib.h>

#include <algorithm>
#include <limits>
#include <set>

#include "mtead/byte-io.h"
#include "mtead/error.h"

namespace mtead {
namespace {

constexpr std::string_view kMagic = "MTEAD1";
constexpr std::string_view kFamily = "MTEAD";

std::uint32_t Crc32(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in pieces.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef *>(bytes.data() + pos), static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void TensorList::Add(const std::string &name, const Tensor &value) {
  if (Contains(name)) throw ConfigError("tensor list: duplicate name " + name);
  items_.push_back({name, value});
}

void TensorList::AddScalar(const std::string &name, double v) {
  Add(name, Tensor({1}, std::vector<double>{v}));
}

void TensorList::AddVector(const std::string &name, const std::vector<double> &v) {
  if (v.empty()) throw ConfigError("tensor list: empty vector for " + name);
  Add(name, Tensor({v.size()}, v));
}

bool TensorList::Contains(const std::string &name) const {
  return std::any_of(items_.begin(), items_.end(), [&](const NamedTensor &t) { return t.name == name; });
}

const Tensor &TensorList::Get(const std::string &name) const {
  for (const auto &t : items_) {
    if (t.name == name) return t.value;
  }
  throw FormatError("checkpoint: missing tensor " + name);
}

double TensorList::GetScalar(const std::string &name) const {
  const Tensor &t = Get(name);
  if (t.numel() != 1) throw ShapeError("checkpoint: " + name + " is not a scalar");
  return t.data()[0];
}

std::vector<double> TensorList::GetVector(const std::string &name) const { return Get(name).ToVector(); }

std::string SerializeCheckpoint(const TensorList &tensors) {
  ByteWriter w;
  w.Bytes(kMagic);
  w.U32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto &[name, t] : tensors.items()) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ConfigError("checkpoint: tensor name too long: " + name.substr(0, 40) + "...");
    }
    w.U16(static_cast<std::uint16_t>(name.size()));
    w.Bytes(name);
    if (t.rank() > std::numeric_limits<std::uint8_t>::max()) throw ConfigError("checkpoint: rank too large");
    w.U8(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.dims()) {
      if (d > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("checkpoint: dimension too large");
      w.U32(static_cast<std::uint32_t>(d));
    }
    for (double v : t.data()) w.F64(v);
  }
  w.U32(Crc32(w.str()));
  return w.Take();
}

TensorList ParseCheckpoint(const std::string &bytes) {
  ByteReader r(bytes, "checkpoint");
  const auto magic = r.Bytes(std::min(bytes.size(), kMagic.size()));
  if (magic != kMagic) {
    if (magic.size() == kMagic.size() && magic.substr(0, kFamily.size()) == kFamily) {
      throw VersionError("checkpoint: format version '" + std::string(magic) + "' is not supported (expected " +
                         std::string(kMagic) + ")");
    }
    if (magic.size() < kMagic.size() && kMagic.substr(0, magic.size()) == magic) {
      throw TruncatedError("checkpoint: truncated inside the header");
    }
    throw FormatError("checkpoint: bad magic, not a checkpoint file");
  }
  TensorList out;
  const std::uint32_t count = r.U32();
  std::set<std::string> names;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t len = r.U16();
    std::string name(r.Bytes(len));
    const std::uint8_t rank = r.U8();
    Shape dims(rank);
    for (auto &d : dims) d = r.U32();
    if (rank == 0 || std::find(dims.begin(), dims.end(), 0u) != dims.end()) {
      throw FormatError("checkpoint: tensor " + name + " has an empty shape");
    }
    const std::size_t n = NumElements(dims);
    if (r.remaining() / 8 < n) {
      throw TruncatedError("checkpoint: truncated in payload of " + name);
    }
    std::vector<double> values(n);
    for (auto &v : values) v = r.F64();
    if (!names.insert(name).second) throw FormatError("checkpoint: duplicate tensor " + name);
    out.Add(name, Tensor(dims, std::move(values)));
  }
  const std::size_t body = r.pos();
  const std::uint32_t crc = r.U32();
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes after checksum");
  if (crc != Crc32(std::string_view(bytes).substr(0, body))) {
    throw FormatError("checkpoint: checksum mismatch (file corrupted)");
  }
  return out;
}

void WriteCheckpoint(const std::string &path, const TensorList &tensors) {
  WriteFileBytes(path, SerializeCheckpoint(tensors));
}

TensorList ReadCheckpoint(const std::string &path) {
  try {
    return ParseCheckpoint(ReadFileBytes(path));
  } catch (const VersionError &e) {
    throw VersionError(path + ": " + e.what());
  } catch (const TruncatedError &e) {
    throw TruncatedError(path + ": " + e.what());
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace mtead
