// Copyright 2026 The AVENet Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AVENET_NUMERICS_MATRIX_H_
#define AVENET_NUMERICS_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <vector>

namespace avenet::nn {

// Storage starts on a cache-line boundary so vectorised kernels see the same
// alignment on every allocation and reduce in the same order.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <typename U>
  friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) noexcept {
    return true;
  }
};

// Dense row-major matrix. `float` is the storage type for everything the
// toolkit trains and writes to disk; the `double` instantiation exists for
// gradient checking and reference computations.
template <typename T>
class BasicMatrix {
 public:
  using value_type = T;

  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> data);

  static BasicMatrix from_rows(std::initializer_list<std::initializer_list<T>> rows);
  static BasicMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const BasicMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  T operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  T* ptr() { return data_.data(); }
  const T* ptr() const { return data_.data(); }
  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void fill(T v);
  bool all_finite() const;

  template <typename U>
  BasicMatrix<U> cast() const {
    BasicMatrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

  // Bitwise value equality (shape and every element).
  friend bool operator==(const BasicMatrix& a, const BasicMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T, AlignedAllocator<T>> data_;
};

using Matrix = BasicMatrix<float>;
using MatrixD = BasicMatrix<double>;

// Plain value-level products. Side-effect free.
template <typename T>
BasicMatrix<T> matmul(const BasicMatrix<T>& a, const BasicMatrix<T>& b);
template <typename T>
BasicMatrix<T> transpose(const BasicMatrix<T>& a);

// out += a * b, out += a * b^T, out += a^T * b (shapes checked by callers).
template <typename T>
void gemm_acc(const BasicMatrix<T>& a, const BasicMatrix<T>& b, BasicMatrix<T>& out);
template <typename T>
void gemm_nt_acc(const BasicMatrix<T>& a, const BasicMatrix<T>& b, BasicMatrix<T>& out);
template <typename T>
void gemm_tn_acc(const BasicMatrix<T>& a, const BasicMatrix<T>& b, BasicMatrix<T>& out);

// Stacks matrices with equal column counts.
template <typename T>
BasicMatrix<T> vstack(std::span<const BasicMatrix<T>* const> parts);

}  // namespace avenet::nn

#endif  // AVENET_NUMERICS_MATRIX_H_
