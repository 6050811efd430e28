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

#ifndef AVENET_COMMON_ERROR_H_
#define AVENET_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace avenet {

// Failure categories. The C API and the CLI exit codes are derived from these.
enum class ErrorKind {
  kShape,       // operand shapes do not agree
  kConfig,      // invalid configuration value
  kValidation,  // input data violates a documented contract
  kParse,       // malformed text input
  kFormat,      // malformed binary file (bad magic, version, size)
  kUsage,       // API misuse (e.g. backward on a non-scalar)
  kIo,          // file system failure
  kNumeric,     // non-finite value during optimisation
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

// Throws a kValidation error when `condition` is false.
inline void require(bool condition, ErrorKind kind, const char* message) {
  if (!condition) fail(kind, message);
}

}  // namespace avenet

#endif  // AVENET_COMMON_ERROR_H_
