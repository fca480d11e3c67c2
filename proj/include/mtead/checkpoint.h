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

#ifndef MTEAD_CHECKPOINT_H_
#define MTEAD_CHECKPOINT_H_

#include <string>
#include <vector>

#include "mtead/tensor.h"

namespace mtead {

struct NamedTensor {
  std::string name;
  Tensor value;
};

// Ordered named tensors; the unit of checkpoint serialization.
class TensorList {
 public:
  void Add(const std::string &name, const Tensor &value);
  void AddScalar(const std::string &name, double v);
  void AddVector(const std::string &name, const std::vector<double> &v);

  bool Contains(const std::string &name) const;
  // Throws FormatError when missing.
  const Tensor &Get(const std::string &name) const;
  double GetScalar(const std::string &name) const;
  std::vector<double> GetVector(const std::string &name) const;

  const std::vector<NamedTensor> &items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<NamedTensor> items_;
};

// Container: magic "MTEAD1", u32 tensor count, then per tensor u16 name
// length, UTF-8 name, u8 rank, u32 dims, little-endian f64 row-major
// payload; a trailing CRC32 of everything before it.
//
// Parse errors: VersionError for another "MTEAD" version, TruncatedError for
// short input, FormatError for a bad magic, checksum or duplicate name.
std::string SerializeCheckpoint(const TensorList &tensors);
TensorList ParseCheckpoint(const std::string &bytes);

void WriteCheckpoint(const std::string &path, const TensorList &tensors);
TensorList ReadCheckpoint(const std::string &path);

}  // namespace mtead

#endif  // MTEAD_CHECKPOINT_H_
