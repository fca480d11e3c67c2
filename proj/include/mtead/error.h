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

#ifndef MTEAD_ERROR_H_
#define MTEAD_ERROR_H_

#include <stdexcept>
#include <string>

namespace mtead {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes or matrix sizes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (even kernel width, k > n, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or text.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input ended before a complete record was read.
class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A container written by an incompatible format version.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Precondition on data content violated (empty sequence, NaN gradient, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtead

#endif  // MTEAD_ERROR_H_
