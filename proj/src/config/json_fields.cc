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

#include "config/json_fields.h"

namespace avenet::config {
namespace {
const Json& empty_object() {
  static const Json kEmpty = Json::object();
  return kEmpty;
}
}  // namespace

FieldReader::FieldReader(const Json& object, std::string path)
    : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) fail(ErrorKind::kConfig, "config: " + path_ + " must be an object");
}

const Json& FieldReader::object(const char* key) {
  seen_.insert(key);
  auto it = object_.find(key);
  if (it == object_.end()) return empty_object();
  if (!it->is_object()) type_error(key, "an object");
  return *it;
}

void FieldReader::finish() const {
  for (const auto& [key, value] : object_.items()) {
    if (!seen_.contains(key)) fail(ErrorKind::kConfig, "config: unknown key '" + path_ + "." + key + "'");
  }
}

void FieldReader::type_error(const char* key, const char* expected) const {
  fail(ErrorKind::kConfig, "config: " + path_ + "." + key + " must be " + expected);
}

}  // namespace avenet::config
