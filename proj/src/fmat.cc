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

#include "mtead/fmat.h"

#include <fstream>
#include <sstream>

#include "mtead/byte-io.h"
#include "mtead/error.h"

namespace mtead {

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::string &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path);
}

std::string SerializeFmat(const Matrix &m) {
  ByteWriter w;
  w.Bytes("FMAT1");
  w.U32(static_cast<std::uint32_t>(m.rows()));
  w.U32(static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) w.F64(v);
  return w.Take();
}

Matrix ParseFmat(const std::string &bytes) {
  ByteReader r(bytes, "fmat");
  if (r.Bytes(5) != "FMAT1") throw FormatError("fmat: bad magic");
  const std::uint32_t rows = r.U32();
  const std::uint32_t cols = r.U32();
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (r.remaining() != n * 8) {
    throw FormatError("fmat: payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(n * 8));
  }
  Matrix m(rows, cols);
  for (auto &v : m.data()) v = r.F64();
  return m;
}

void WriteFmat(const std::string &path, const Matrix &m) { WriteFileBytes(path, SerializeFmat(m)); }

Matrix ReadFmat(const std::string &path) { return ParseFmat(ReadFileBytes(path)); }

}  // namespace mtead
