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

#include "numerics/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common/error.h"
#include "numerics/rng.h"

namespace avenet::nn {
namespace {

template <typename T>
double evaluate(const std::function<Var<T>()>& closure) {
  NoGradGuard guard;
  Var<T> loss = closure();
  if (loss->value.size() != 1) fail(ErrorKind::kUsage, "finite_difference_check: closure must return a scalar");
  return static_cast<double>(loss->value[0]);
}

template <typename T>
double central_difference(const std::function<Var<T>()>& closure, T& entry, double h) {
  const T saved = entry;
  entry = static_cast<T>(saved + h);
  const double up = evaluate(closure);
  entry = static_cast<T>(saved - h);
  const double down = evaluate(closure);
  entry = saved;
  return (up - down) / (2.0 * h);
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace

template <typename T>
GradCheckReport finite_difference_check(const std::function<Var<T>()>& closure,
                                        std::span<const Var<T>> params,
                                        const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) fail(ErrorKind::kConfig, "finite_difference_check: epsilon must be positive");
  GradCheckReport report;

  Var<T> first = closure();
  Var<T> second = closure();
  if (!(first->value == second->value)) {
    report.deterministic = false;
    report.diagnostic = "closure is not deterministic: two identical evaluations differ";
    return report;
  }

  zero_grad(params);
  backward(first);

  std::size_t total = 0;
  for (const auto& p : params) total += p->value.size();
  if (total == 0) {
    report.diagnostic = "no parameters to probe";
    return report;
  }

  Rng rng(options.seed);
  std::ostringstream worst;
  for (std::size_t probe = 0; probe < options.probes; ++probe) {
    std::size_t flat = rng.index(total);
    std::size_t k = 0;
    while (flat >= params[k]->value.size()) flat -= params[k++]->value.size();
    T& entry = params[k]->value[flat];
    const double analytic = params[k]->grad[flat];

    double h = options.epsilon;
    double numeric = central_difference(closure, entry, h);
    for (int r = 0; r < options.max_refinements; ++r) {
      const double half = central_difference(closure, entry, h / 2.0);
      if (relative_error(numeric, half, options.floor) <= options.tolerance / 4.0) {
        numeric = half;
        break;
      }
      if (r == 0) ++report.refined_probes;
      h /= 10.0;
      numeric = central_difference(closure, entry, h);
    }

    const double err = relative_error(analytic, numeric, options.floor);
    if (err > report.max_relative_error) {
      report.max_relative_error = err;
      worst.str("");
      worst << "param " << k << " entry " << flat << ": analytic " << analytic << " numeric "
            << numeric;
    }
    ++report.probes;
  }
  zero_grad(params);
  report.passed = report.max_relative_error <= options.tolerance;
  report.diagnostic = worst.str();
  return report;
}

template GradCheckReport finite_difference_check(const std::function<Var<float>()>&,
                                                 std::span<const Var<float>>,
                                                 const GradCheckOptions&);
template GradCheckReport finite_difference_check(const std::function<Var<double>()>&,
                                                 std::span<const Var<double>>,
                                                 const GradCheckOptions&);

}  // namespace avenet::nn
