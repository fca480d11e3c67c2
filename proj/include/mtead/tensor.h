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

#ifndef MTEAD_TENSOR_H_
#define MTEAD_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <new>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mtead {

using Shape = std::vector<std::size_t>;

// 64-byte aligned storage. Vectorized reductions peel unaligned heads, so a
// fixed alignment is what makes results bit-reproducible across runs.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U> &) {}

  T *allocate(std::size_t n) { return static_cast<T *>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T *p, std::size_t) { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U> &) const { return true; }
};

using Buffer = std::vector<double, AlignedAllocator<double>>;

std::size_t NumElements(const Shape &dims);
std::string ShapeToString(const Shape &dims);

// Dense row-major float64 array with an optional gradient buffer.
//
// Tensor is a handle: copies share the same storage. Use Clone() for a deep
// copy. Parameters are leaves created with requires_grad = true; every other
// tensor is produced by an op in ops.h.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape dims, bool requires_grad = false);
  Tensor(Shape dims, std::vector<double> values, bool requires_grad = false);

  static Tensor Scalar(double v, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(s_); }
  const Shape &dims() const { return s_->dims; }
  std::size_t dim(std::size_t i) const { return s_->dims.at(i); }
  std::size_t rank() const { return s_->dims.size(); }
  std::size_t numel() const { return s_->value.size(); }

  std::span<double> data() { return s_->value; }
  std::span<const double> data() const { return s_->value; }
  double *ptr() { return s_->value.data(); }
  const double *ptr() const { return s_->value.data(); }
  Buffer &values() { return s_->value; }
  const Buffer &values() const { return s_->value; }
  std::vector<double> ToVector() const { return {s_->value.begin(), s_->value.end()}; }

  double item() const;
  // 2-D element access.
  double at(std::size_t r, std::size_t c) const;
  double &at(std::size_t r, std::size_t c);

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool v) { s_->requires_grad = v; }

  bool has_grad() const { return !s_->grad.empty(); }
  // Gradient buffer, allocated (zero-filled) on first use. Gradients are an
  // accumulation side channel, so they stay writable through const handles.
  std::span<double> grad() const;
  double *grad_ptr() const { return grad().data(); }
  void zero_grad();
  void drop_grad() { s_->grad.clear(); }

  Tensor Clone() const;
  bool SameStorage(const Tensor &o) const { return s_ == o.s_; }

 private:
  struct Storage {
    Shape dims;
    Buffer value;
    Buffer grad;
    bool requires_grad = false;
  };
  std::shared_ptr<Storage> s_;
};

// Seeded random source shared by initializers, simulators and trainers.
using Rng = std::mt19937_64;

void FillUniform(Tensor *t, double lo, double hi, Rng *rng);
void FillNormal(Tensor *t, double mean, double stddev, Rng *rng);

bool AllFinite(std::span<const double> v);

}  // namespace mtead

#endif  // MTEAD_TENSOR_H_
