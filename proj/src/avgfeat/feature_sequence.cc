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

#include "avgfeat/feature_sequence.h"

#include "common/error.h"

namespace avenet {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kRaw: return "raw";
    case Provenance::kAvenetOutput: return "avenet-output";
    case Provenance::kAverage: return "average";
    case Provenance::kConverted: return "converted";
  }
  return "unknown";
}

bool provenance_from_u8(std::uint8_t v, Provenance& out) {
  if (v > static_cast<std::uint8_t>(Provenance::kConverted)) return false;
  out = static_cast<Provenance>(v);
  return true;
}

FeatureSequence::FeatureSequence(nn::Matrix values, Provenance provenance)
    : values_(std::move(values)), provenance_(provenance) {
  if (!values_.all_finite()) fail(ErrorKind::kValidation, "feature sequence contains non-finite values");
}

}  // namespace avenet
