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

#include "numerics/params.h"

#include "common/error.h"

namespace avenet::nn {

template <typename T>
std::size_t ParamSet<T>::add(std::string name, BasicMatrix<T> init) {
  if (index_.contains(name)) fail(ErrorKind::kUsage, "duplicate parameter name '" + name + "'");
  const std::size_t i = vars_.size();
  index_.emplace(name, i);
  names_.push_back(std::move(name));
  vars_.push_back(parameter(std::move(init)));
  return i;
}

template <typename T>
const Var<T>& ParamSet<T>::operator[](std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorKind::kUsage, "unknown parameter '" + std::string(name) + "'");
  return vars_[it->second];
}

template <typename T>
std::size_t ParamSet<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : vars_) n += v->value.size();
  return n;
}

template <typename T>
bool ParamSet<T>::values_equal(const ParamSet& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (!(vars_[i]->value == other.vars_[i]->value)) return false;
  }
  return true;
}

template class ParamSet<float>;
template class ParamSet<double>;

}  // namespace avenet::nn
