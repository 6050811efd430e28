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

#include "numerics/matrix.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace avenet::nn {
namespace {

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstMap = Eigen::Map<const RowMajor<T>>;
template <typename T>
using MutMap = Eigen::Map<RowMajor<T>>;

template <typename T>
ConstMap<T> view(const BasicMatrix<T>& m) {
  return ConstMap<T>(m.ptr(), static_cast<Eigen::Index>(m.rows()),
                     static_cast<Eigen::Index>(m.cols()));
}
template <typename T>
MutMap<T> view(BasicMatrix<T>& m) {
  return MutMap<T>(m.ptr(), static_cast<Eigen::Index>(m.rows()),
                   static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

template <typename T>
BasicMatrix<T>::BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
    : rows_(rows), cols_(cols), data_(data.begin(), data.end()) {
  if (data_.size() != rows * cols) {
    fail(ErrorKind::kShape, "matrix data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
}

template <typename T>
BasicMatrix<T> BasicMatrix<T>::from_rows(std::initializer_list<std::initializer_list<T>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<T> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) fail(ErrorKind::kShape, "ragged row list");
    data.insert(data.end(), row.begin(), row.end());
  }
  return BasicMatrix(r, c, std::move(data));
}

template <typename T>
BasicMatrix<T> BasicMatrix<T>::identity(std::size_t n) {
  BasicMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
  return m;
}

template <typename T>
void BasicMatrix<T>::fill(T v) {
  std::fill(data_.begin(), data_.end(), v);
}

template <typename T>
bool BasicMatrix<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template <typename T>
BasicMatrix<T> matmul(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorKind::kShape, "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " times " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
  BasicMatrix<T> out(a.rows(), b.cols());
  gemm_acc(a, b, out);
  return out;
}

template <typename T>
BasicMatrix<T> transpose(const BasicMatrix<T>& a) {
  BasicMatrix<T> out(a.cols(), a.rows());
  view(out) = view(a).transpose();
  return out;
}

template <typename T>
void gemm_acc(const BasicMatrix<T>& a, const BasicMatrix<T>& b, BasicMatrix<T>& out) {
  if (a.size() == 0 || b.size() == 0) return;
  view(out).noalias() += view(a) * view(b);
}

template <typename T>
void gemm_nt_acc(const BasicMatrix<T>& a, const BasicMatrix<T>& b, BasicMatrix<T>& out) {
  if (a.size() == 0 || b.size() == 0) return;
  view(out).noalias() += view(a) * view(b).transpose();
}

template <typename T>
void gemm_tn_acc(const BasicMatrix<T>& a, const BasicMatrix<T>& b, BasicMatrix<T>& out) {
  if (a.size() == 0 || b.size() == 0) return;
  view(out).noalias() += view(a).transpose() * view(b);
}

template <typename T>
BasicMatrix<T> vstack(std::span<const BasicMatrix<T>* const> parts) {
  std::size_t rows = 0;
  const std::size_t cols = parts.empty() ? 0 : parts.front()->cols();
  for (const auto* p : parts) {
    if (p->cols() != cols) fail(ErrorKind::kShape, "vstack: column count mismatch");
    rows += p->rows();
  }
  BasicMatrix<T> out(rows, cols);
  T* dst = out.ptr();
  for (const auto* p : parts) dst = std::copy(p->ptr(), p->ptr() + p->size(), dst);
  return out;
}

#define AVENET_INSTANTIATE(T)                                                              \
  template class BasicMatrix<T>;                                                           \
  template BasicMatrix<T> matmul(const BasicMatrix<T>&, const BasicMatrix<T>&);            \
  template BasicMatrix<T> transpose(const BasicMatrix<T>&);                                \
  template void gemm_acc(const BasicMatrix<T>&, const BasicMatrix<T>&, BasicMatrix<T>&);    \
  template void gemm_nt_acc(const BasicMatrix<T>&, const BasicMatrix<T>&, BasicMatrix<T>&); \
  template void gemm_tn_acc(const BasicMatrix<T>&, const BasicMatrix<T>&, BasicMatrix<T>&); \
  template BasicMatrix<T> vstack(std::span<const BasicMatrix<T>* const>);

AVENET_INSTANTIATE(float)
AVENET_INSTANTIATE(double)
#undef AVENET_INSTANTIATE

}  // namespace avenet::nn
