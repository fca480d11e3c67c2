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

#include "mtead/tensor.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "mtead/error.h"

namespace mtead {

std::size_t NumElements(const Shape &dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string ShapeToString(const Shape &dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << 'x';
    os << dims[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape dims, bool requires_grad) : s_(std::make_shared<Storage>()) {
  for (auto d : dims) {
    if (d == 0) throw ShapeError("tensor dims must be positive: " + ShapeToString(dims));
  }
  s_->value.assign(NumElements(dims), 0.0);
  s_->dims = std::move(dims);
  s_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape dims, std::vector<double> values, bool requires_grad)
    : s_(std::make_shared<Storage>()) {
  for (auto d : dims) {
    if (d == 0) throw ShapeError("tensor dims must be positive: " + ShapeToString(dims));
  }
  if (NumElements(dims) != values.size()) {
    throw ShapeError("tensor data length " + std::to_string(values.size()) +
                     " does not match dims " + ShapeToString(dims));
  }
  s_->dims = std::move(dims);
  s_->value.assign(values.begin(), values.end());
  s_->requires_grad = requires_grad;
}

Tensor Tensor::Scalar(double v, bool requires_grad) {
  return Tensor({1}, {v}, requires_grad);
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on non-scalar " + ShapeToString(dims()));
  return s_->value[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return s_->value[r * s_->dims.back() + c];
}

double &Tensor::at(std::size_t r, std::size_t c) {
  return s_->value[r * s_->dims.back() + c];
}

std::span<double> Tensor::grad() const {
  if (s_->grad.empty()) s_->grad.assign(s_->value.size(), 0.0);
  return s_->grad;
}

void Tensor::zero_grad() {
  if (!s_->grad.empty()) std::fill(s_->grad.begin(), s_->grad.end(), 0.0);
}

Tensor Tensor::Clone() const {
  Tensor t;
  t.s_ = std::make_shared<Storage>(*s_);
  return t;
}

void FillUniform(Tensor *t, double lo, double hi, Rng *rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto &v : t->data()) v = dist(*rng);
}

void FillNormal(Tensor *t, double mean, double stddev, Rng *rng) {
  std::normal_distribution<double> dist(mean, stddev);
  for (auto &v : t->data()) v = dist(*rng);
}

bool AllFinite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace mtead
