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

#ifndef AVENET_NUMERICS_ADAM_H_
#define AVENET_NUMERICS_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "numerics/autodiff.h"

namespace avenet::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamState() = default;
  AdamState(std::span<const Var<T>> params, AdamOptions opts);

  AdamOptions options;
  std::uint64_t step = 0;
  std::vector<BasicMatrix<T>> first_moment;
  std::vector<BasicMatrix<T>> second_moment;
};

// Bias-corrected adaptive-moment update of every parameter from its
// accumulated gradient, then zeroes the gradients.
template <typename T>
void adam_step(std::span<const Var<T>> params, AdamState<T>& state);

}  // namespace avenet::nn

#endif  // AVENET_NUMERICS_ADAM_H_
