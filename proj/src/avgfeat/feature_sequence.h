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

#ifndef AVENET_AVGFEAT_FEATURE_SEQUENCE_H_
#define AVENET_AVGFEAT_FEATURE_SEQUENCE_H_

#include <cstdint>

#include "numerics/matrix.h"

namespace avenet {

// Where a feature sequence came from. The numeric values are part of the
// FPK1 file format.
enum class Provenance : std::uint8_t {
  kRaw = 0,
  kAvenetOutput = 1,
  kAverage = 2,
  kConverted = 3,
};

const char* to_string(Provenance p);
bool provenance_from_u8(std::uint8_t v, Provenance& out);

// T x D frames, one row per frame. Values are finite; the provenance tag is
// fixed at construction.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  FeatureSequence(nn::Matrix values, Provenance provenance);

  std::size_t frames() const { return values_.rows(); }
  std::size_t dim() const { return values_.cols(); }
  const nn::Matrix& values() const { return values_; }
  Provenance provenance() const { return provenance_; }

 private:
  nn::Matrix values_;
  Provenance provenance_ = Provenance::kRaw;
};

}  // namespace avenet

#endif  // AVENET_AVGFEAT_FEATURE_SEQUENCE_H_
