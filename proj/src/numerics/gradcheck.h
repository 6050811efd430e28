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

#ifndef AVENET_NUMERICS_GRADCHECK_H_
#define AVENET_NUMERICS_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "numerics/autodiff.h"

namespace avenet::nn {

struct GradCheckOptions {
  std::size_t probes = 32;
  double epsilon = 1e-3;
  double tolerance = 1e-3;
  // Denominator floor of the relative error, so entries whose true
  // gradient is zero compare on an absolute scale.
  double floor = 1e-8;
  // When central differences at h and h/2 disagree the probe straddles a
  // non-smooth point (an L1 tie, a ReLU hinge); the step is shrunk by 10x
  // up to this many times.
  int max_refinements = 3;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  std::size_t probes = 0;
  std::size_t refined_probes = 0;
  double max_relative_error = 0.0;
  bool deterministic = true;
  bool passed = false;
  std::string diagnostic;
};

// Compares analytic gradients from backward() with central differences on
// randomly chosen parameter entries. `closure` must rebuild the scalar loss
// from the current parameter values on every call.
template <typename T>
GradCheckReport finite_difference_check(const std::function<Var<T>()>& closure,
                                        std::span<const Var<T>> params,
                                        const GradCheckOptions& options);

}  // namespace avenet::nn

#endif  // AVENET_NUMERICS_GRADCHECK_H_
