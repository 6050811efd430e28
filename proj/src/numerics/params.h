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

#ifndef AVENET_NUMERICS_PARAMS_H_
#define AVENET_NUMERICS_PARAMS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numerics/autodiff.h"

namespace avenet::nn {

// Named, ordered collection of trainable leaves. Declaration order is the
// on-disk order of every checkpoint format.
template <typename T>
class ParamSet {
 public:
  std::size_t add(std::string name, BasicMatrix<T> init);

  const Var<T>& operator[](std::string_view name) const;
  const Var<T>& at(std::size_t i) const { return vars_.at(i); }
  std::span<const Var<T>> vars() const { return vars_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return vars_.size(); }
  std::size_t scalar_count() const;

  // Deep copy into fresh leaves (gradients zeroed).
  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (std::size_t i = 0; i < vars_.size(); ++i) out.add(names_[i], vars_[i]->value.template cast<U>());
    return out;
  }
  ParamSet clone() const { return cast<T>(); }

  bool values_equal(const ParamSet& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Var<T>> vars_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace avenet::nn

#endif  // AVENET_NUMERICS_PARAMS_H_
