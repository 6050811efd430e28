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

#include "avgfeat/stats.h"

#include <cmath>
#include <map>

#include "common/error.h"

namespace avenet {

FeatureSequence average_feature(std::span<const FeatureSequence* const> members) {
  if (members.empty()) fail(ErrorKind::kValidation, "average_feature: empty member selection");
  const std::size_t t = members.front()->frames();
  const std::size_t d = members.front()->dim();
  std::vector<double> acc(t * d, 0.0);
  for (const auto* m : members) {
    if (m->frames() != t || m->dim() != d) {
      fail(ErrorKind::kValidation, "average_feature: members are not frame-aligned");
    }
    const auto v = m->values().data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  nn::Matrix out(t, d);
  const double n = static_cast<double>(members.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / n);
  return FeatureSequence(std::move(out), Provenance::kAverage);
}

FeatureSequence average_feature(const faps::FapsGroup& group, MemberSelection selection) {
  std::vector<const FeatureSequence*> picked;
  for (const auto& m : group.members) {
    if (selection == MemberSelection::kAll || m.role == faps::MemberRole::kBase) picked.push_back(&m.features);
  }
  return average_feature(picked);
}

double mean_absolute_value(const FeatureSequence& seq) {
  if (seq.values().empty()) fail(ErrorKind::kValidation, "mean_absolute_value: empty sequence");
  double acc = 0.0;
  for (float v : seq.values().data()) acc += std::abs(static_cast<double>(v));
  return acc / static_cast<double>(seq.values().size());
}

double pair_distance(const FeatureSequence& a, const FeatureSequence& b) {
  if (!a.values().same_shape(b.values())) fail(ErrorKind::kValidation, "pair_distance: shapes differ");
  if (a.values().empty()) fail(ErrorKind::kValidation, "pair_distance: empty sequences");
  const auto x = a.values().data();
  const auto y = b.values().data();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(static_cast<double>(x[i]) - static_cast<double>(y[i]));
  return acc / static_cast<double>(x.size());
}

std::vector<std::pair<MemberRef, MemberRef>> sample_member_pairs(
    std::span<const faps::FapsGroup* const> groups, PairPool pool, std::size_t count, Rng& rng) {
  std::vector<std::size_t> usable;
  std::vector<std::vector<std::size_t>> eligible(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t m = 0; m < groups[g]->members.size(); ++m) {
      const bool base = groups[g]->members[m].role == faps::MemberRole::kBase;
      if (pool == PairPool::kAll || (pool == PairPool::kBase) == base) eligible[g].push_back(m);
    }
    if (eligible[g].size() >= 2) usable.push_back(g);
  }
  if (usable.empty()) fail(ErrorKind::kValidation, "no group has two members eligible for pairing");
  std::vector<std::pair<MemberRef, MemberRef>> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t g = usable[rng.index(usable.size())];
    const auto& e = eligible[g];
    const std::size_t a = rng.index(e.size());
    std::size_t b = rng.index(e.size() - 1);
    if (b >= a) ++b;
    pairs.push_back({{g, e[a]}, {g, e[b]}});
  }
  return pairs;
}

DistanceReport distance_report(std::span<const faps::FapsGroup* const> groups,
                               const encoder::EncoderParams* encoder, std::size_t pair_count,
                               PairPool pool, Rng& rng) {
  if (pair_count == 0) fail(ErrorKind::kValidation, "distance_report: pair count must be >= 1");
  const auto pairs = sample_member_pairs(groups, pool, pair_count, rng);

  auto key = [](const MemberRef& r) { return std::pair(r.group, r.member); };
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
  std::vector<const FeatureSequence*> unique;
  for (const auto& [a, b] : pairs) {
    for (const auto& r : {a, b}) {
      if (slot.emplace(key(r), unique.size()).second) {
        unique.push_back(&groups[r.group]->members[r.member].features);
      }
    }
  }
  std::vector<nn::Matrix> encoded;
  if (encoder != nullptr) {
    constexpr std::size_t kChunk = 64;
    for (std::size_t i = 0; i < unique.size(); i += kChunk) {
      std::vector<const nn::Matrix*> chunk;
      for (std::size_t j = i; j < std::min(unique.size(), i + kChunk); ++j) chunk.push_back(&unique[j]->values());
      for (auto& m : encoder::encode_batch(*encoder, chunk)) encoded.push_back(std::move(m));
    }
  }

  DistanceReport r;
  r.pair_count = pairs.size();
  double mav = 0.0, mav_enc = 0.0, d_origin = 0.0, d_enc = 0.0;
  for (const auto& [a, b] : pairs) {
    const std::size_t ia = slot.at(key(a)), ib = slot.at(key(b));
    mav += 0.5 * (mean_absolute_value(*unique[ia]) + mean_absolute_value(*unique[ib]));
    d_origin += pair_distance(*unique[ia], *unique[ib]);
    if (encoder != nullptr) {
      const FeatureSequence ya(encoded[ia], Provenance::kAvenetOutput);
      const FeatureSequence yb(encoded[ib], Provenance::kAvenetOutput);
      mav_enc += 0.5 * (mean_absolute_value(ya) + mean_absolute_value(yb));
      d_enc += pair_distance(ya, yb);
    }
  }
  const double n = static_cast<double>(pairs.size());
  r.mav = mav / n;
  r.mean_pair_distance_origin = d_origin / n;
  if (encoder != nullptr) {
    r.mav_avenet = mav_enc / n;
    r.mean_pair_distance_avenet = d_enc / n;
    if (r.mean_pair_distance_avenet > 0.0) r.reduction_ratio = r.mean_pair_distance_origin / r.mean_pair_distance_avenet;
  }
  return r;
}

}  // namespace avenet
