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

#ifndef AVENET_CONFIG_JSON_FIELDS_H_
#define AVENET_CONFIG_JSON_FIELDS_H_

#include <set>
#include <string>

#include "common/error.h"
#include "json.hpp"

namespace avenet::config {

using Json = nlohmann::ordered_json;

// Reads named fields out of one JSON object and rejects any key that was
// never asked for. Type mismatches and unknown keys are kConfig errors
// naming the full dotted path.
class FieldReader {
 public:
  FieldReader(const Json& object, std::string path);

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) type_error(key, "a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) type_error(key, "an integer");
        if (std::is_unsigned_v<T> && it->template get<long long>() < 0) type_error(key, "non-negative");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) type_error(key, "a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) type_error(key, "a string");
      }
      out = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kConfig, "config: " + path_ + "." + key + ": " + e.what());
    }
  }

  // A sub-object; absent keys give an empty object.
  const Json& object(const char* key);
  void finish() const;

 private:
  [[noreturn]] void type_error(const char* key, const char* expected) const;

  const Json& object_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace avenet::config

#endif  // AVENET_CONFIG_JSON_FIELDS_H_
