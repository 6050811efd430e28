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

#ifndef AVENET_NUMERICS_RNG_H_
#define AVENET_NUMERICS_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace avenet {

// Seeded random source with hand-rolled distributions. Output depends only on
// the seed, never on the standard library in use. No spare normals are cached.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (seed, tags...), e.g. derive(seed, {kGroup, id}).
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  // Inclusive on both ends; unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1)); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

}  // namespace avenet

#endif  // AVENET_NUMERICS_RNG_H_
