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

#ifndef AVENET_AVGFEAT_STATS_H_
#define AVENET_AVGFEAT_STATS_H_

#include <optional>
#include <span>
#include <vector>

#include "avgfeat/feature_sequence.h"
#include "encoder/model.h"
#include "faps/faps.h"

namespace avenet {

enum class MemberSelection { kBaseOnly, kAll };

// Elementwise mean over the selected members, tagged kAverage.
FeatureSequence average_feature(const faps::FapsGroup& group,
                                MemberSelection members = MemberSelection::kBaseOnly);
FeatureSequence average_feature(std::span<const FeatureSequence* const> members);

double mean_absolute_value(const FeatureSequence& seq);
// Mean absolute elementwise difference.
double pair_distance(const FeatureSequence& a, const FeatureSequence& b);

struct DistanceReport {
  double mav = 0.0;         // origin features
  double mav_avenet = 0.0;  // 0 when no encoder was given
  double mean_pair_distance_origin = 0.0;
  double mean_pair_distance_avenet = 0.0;
  double reduction_ratio = 0.0;  // 0 when no encoder was given
  std::size_t pair_count = 0;
};

// Which members a pair may be drawn from.
enum class PairPool { kBase, kLws, kAll };

struct MemberRef {
  std::size_t group = 0;  // index into the group span
  std::size_t member = 0;
};

// Draws `count` within-group pairs of distinct members from `pool`.
// Groups without two eligible members are skipped.
std::vector<std::pair<MemberRef, MemberRef>> sample_member_pairs(
    std::span<const faps::FapsGroup* const> groups, PairPool pool, std::size_t count, Rng& rng);

DistanceReport distance_report(std::span<const faps::FapsGroup* const> groups,
                               const encoder::EncoderParams* encoder, std::size_t pair_count,
                               PairPool pool, Rng& rng);

}  // namespace avenet

#endif  // AVENET_AVGFEAT_STATS_H_
