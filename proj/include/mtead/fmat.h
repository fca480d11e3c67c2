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

#ifndef MTEAD_FMAT_H_
#define MTEAD_FMAT_H_

#include <string>

#include "mtead/matrix.h"

namespace mtead {

// FMAT container: magic "FMAT1", u32 rows, u32 cols, then rows * cols
// little-endian float64 values in row-major order.
std::string SerializeFmat(const Matrix &m);
Matrix ParseFmat(const std::string &bytes);

void WriteFmat(const std::string &path, const Matrix &m);
Matrix ReadFmat(const std::string &path);

}  // namespace mtead

#endif  // MTEAD_FMAT_H_
