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

#include "numerics/adam.h"

#include <cmath>

#include "common/error.h"

namespace avenet::nn {

template <typename T>
AdamState<T>::AdamState(std::span<const Var<T>> params, AdamOptions opts) : options(opts) {
  for (const auto& p : params) {
    first_moment.emplace_back(p->value.rows(), p->value.cols());
    second_moment.emplace_back(p->value.rows(), p->value.cols());
  }
}

template <typename T>
void adam_step(std::span<const Var<T>> params, AdamState<T>& state) {
  if (state.first_moment.size() != params.size()) {
    fail(ErrorKind::kUsage, "adam_step: optimizer state does not match parameter list");
  }
  ++state.step;
  const auto& o = state.options;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (!m.same_shape(p.value)) fail(ErrorKind::kShape, "adam_step: moment shape mismatch");
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const double mi = o.beta1 * m[i] + (1.0 - o.beta1) * g;
      const double vi = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = o.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + o.epsilon);
      p.value[i] = static_cast<T>(p.value[i] - update);
    }
    p.grad.fill(T(0));
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(std::span<const Var<float>>, AdamState<float>&);
template void adam_step(std::span<const Var<double>>, AdamState<double>&);

}  // namespace avenet::nn
