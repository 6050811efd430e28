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

#ifndef AVENET_NUMERICS_AUTODIFF_H_
#define AVENET_NUMERICS_AUTODIFF_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "numerics/matrix.h"

namespace avenet::nn {

// One vertex of a reverse-mode graph. Nodes own their value and, when they
// require a gradient, an accumulator of the same shape. Parents are held
// strongly so a loss node keeps its whole graph alive.
template <typename T>
struct Node {
  BasicMatrix<T> value;
  BasicMatrix<T> grad;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates adjoints into the parents.
  std::function<void(Node&)> backward_rule;
  const char* op = "leaf";
  bool requires_grad = false;
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

// While alive, ops on this thread build no graph (inference mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// A contiguous row range of a stacked batch: one sequence.
struct Segment {
  std::size_t begin = 0;
  std::size_t length = 0;
};

template <typename T>
Var<T> constant(BasicMatrix<T> value);
template <typename T>
Var<T> parameter(BasicMatrix<T> value);

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b);
// a * b^T
template <typename T>
Var<T> matmul_nt(const Var<T>& a, const Var<T>& b);

// Elementwise ops. `b` may be a 1 x cols row that is broadcast over a's rows.
template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> scale(const Var<T>& a, double factor);
template <typename T>
Var<T> gelu(const Var<T>& a);
template <typename T>
Var<T> relu(const Var<T>& a);

template <typename T>
Var<T> layer_norm(const Var<T>& a, const Var<T>& gain, const Var<T>& bias, double eps);
template <typename T>
Var<T> softmax_rows(const Var<T>& a);

// Per-column convolution along rows with `kernels` of shape width x cols.
// Each segment is zero padded independently so sequences in a stacked batch
// never see each other; an empty segment list means one segment.
template <typename T>
Var<T> depthwise_conv1d(const Var<T>& a, const Var<T>& kernels, std::size_t kernel_width,
                        std::span<const Segment> segments = {});

// Mean absolute difference, accumulated in double. Subgradient 0 at ties.
template <typename T>
Var<T> l1_loss(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> l1_loss(const Var<T>& a, const BasicMatrix<T>& target);

template <typename T>
Var<T> sum(const Var<T>& a);
// Mean negative log-likelihood of integer row labels under softmax(logits).
template <typename T>
Var<T> cross_entropy(const Var<T>& logits, std::span<const int> labels);

template <typename T>
Var<T> slice_rows(const Var<T>& a, std::size_t begin, std::size_t count);
template <typename T>
Var<T> slice_cols(const Var<T>& a, std::size_t begin, std::size_t count);
template <typename T>
Var<T> concat_rows(std::span<const Var<T>> parts);
template <typename T>
Var<T> concat_cols(std::span<const Var<T>> parts);

// Propagates d(loss)/d(node) to every reachable node. Intermediate
// gradients are recomputed on each call; leaf gradients accumulate.
template <typename T>
void backward(const Var<T>& loss);

template <typename T>
void zero_grad(std::span<const Var<T>> params);

}  // namespace avenet::nn

#endif  // AVENET_NUMERICS_AUTODIFF_H_
