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
#include <algorithm>
#include <cmath>

#include "avgfeat/stats.h"
#include "faps/corpus.h"
#include "test_util.h"

using namespace avenet;
using avenet::testing::random_matrix;

namespace {

faps::FapsGroup random_group(std::size_t base, std::size_t lws, std::size_t t, std::size_t d, Rng& rng) {
  faps::FapsGroup g;
  g.script.entries.push_back({0, static_cast<std::uint32_t>(t)});
  for (std::size_t i = 0; i < base + lws; ++i) {
    faps::FapsMember m;
    m.role = i < base ? faps::MemberRole::kBase : faps::MemberRole::kLws;
    m.speaker.id = "s" + std::to_string(i);
    m.features = FeatureSequence(random_matrix(t, d, rng, -3, 3), Provenance::kRaw);
    g.members.push_back(std::move(m));
  }
  return g;
}

// Plain per-element loop, no shared code with the module under test.
nn::MatrixD brute_mean(const faps::FapsGroup& g, bool base_only) {
  const auto& first = g.members.front().features.values();
  nn::MatrixD out(first.rows(), first.cols());
  std::size_t n = 0;
  for (const auto& m : g.members) {
    if (base_only && m.role != faps::MemberRole::kBase) continue;
    ++n;
    for (std::size_t r = 0; r < out.rows(); ++r)
      for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += m.features.values()(r, c);
  }
  for (auto& v : out.data()) v /= double(n);
  return out;
}

FeatureSequence seq(const nn::Matrix& m) { return FeatureSequence(m, Provenance::kRaw); }

}  // namespace

TEST_SUITE("avgfeat") {

TEST_CASE("average_feature: mean of one, symmetric pair, provenance") {
  Rng rng(1);
  const auto m = random_matrix(4, 3, rng);
  const FeatureSequence a = seq(m);
  const FeatureSequence* one[] = {&a};
  CHECK(average_feature(one).values() == m);
  CHECK(average_feature(one).provenance() == Provenance::kAverage);

  nn::Matrix neg = m;
  for (auto& v : neg.data()) v = -v;
  const FeatureSequence b = seq(neg);
  const FeatureSequence* pair[] = {&a, &b};
  const auto pair_avg = average_feature(pair);
  for (float v : pair_avg.values().data()) CHECK(v == 0.0f);

  const FeatureSequence c = seq(random_matrix(5, 3, rng));
  const FeatureSequence* misaligned[] = {&a, &c};
  CHECK_ERROR_KIND(average_feature(misaligned), ErrorKind::kValidation);
  CHECK_ERROR_KIND(average_feature(std::span<const FeatureSequence* const>()), ErrorKind::kValidation);
}

TEST_CASE("average_feature matches a brute-force mean on random groups") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_group(2 + rng.index(10), rng.index(4), 1 + rng.index(40), 1 + rng.index(16), rng);
    for (bool base_only : {true, false}) {
      const auto got = average_feature(g, base_only ? MemberSelection::kBaseOnly : MemberSelection::kAll).values();
      const auto ref = brute_mean(g, base_only);
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) <= 1e-6);
    }
  }
}

TEST_CASE("average_feature is permutation invariant and Jensen-bounded") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_group(6, 0, 12, 5, rng);
    const auto avg = average_feature(g);
    double mean_mav = 0;
    for (const auto& m : g.members) mean_mav += mean_absolute_value(m.features);
    mean_mav /= g.members.size();
    CHECK(mean_absolute_value(avg) <= mean_mav + 1e-9);
    std::reverse(g.members.begin(), g.members.end());
    std::swap(g.members[1], g.members[4]);
    const auto avg2 = average_feature(g).values();
    for (std::size_t i = 0; i < avg2.size(); ++i) CHECK(std::abs(avg2[i] - avg.values()[i]) <= 1e-6);
  }
}

TEST_CASE("mean_absolute_value hand values") {
  CHECK(mean_absolute_value(seq(nn::Matrix(3, 2))) == 0.0);
  CHECK(mean_absolute_value(seq(nn::Matrix::from_rows({{1, -1}, {2, -2}}))) == 1.5);
  CHECK_ERROR_KIND(mean_absolute_value(seq(nn::Matrix())), ErrorKind::kValidation);
}

TEST_CASE("pair_distance is a pseudometric") {
  Rng rng(4);
  const auto m = random_matrix(6, 4, rng);
  nn::Matrix plus = m;
  for (auto& v : plus.data()) v += 0.1f;
  CHECK(pair_distance(seq(m), seq(m)) == 0.0);
  CHECK(pair_distance(seq(m), seq(plus)) == doctest::Approx(0.1).epsilon(1e-5));
  CHECK_ERROR_KIND(pair_distance(seq(m), seq(random_matrix(6, 3, rng))), ErrorKind::kValidation);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t t = 1 + rng.index(20), d = 1 + rng.index(10);
    const auto a = seq(random_matrix(t, d, rng)), b = seq(random_matrix(t, d, rng)), c = seq(random_matrix(t, d, rng));
    const double ab = pair_distance(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab == pair_distance(b, a));
    CHECK(pair_distance(a, c) <= ab + pair_distance(b, c) + 1e-5);
  }
}

TEST_CASE("distance_report: identity encoder gives ratio one") {
  faps::CorpusConfig cfg;
  cfg.groups = 10;
  cfg.base_speakers = 3;
  cfg.lws_members = 2;
  cfg.feature_dim = 5;
  cfg.content_dim = 2;
  cfg.speaker_dim = 2;
  cfg.phonemes = 4;
  cfg.script_length = {2, 4};
  cfg.phoneme_duration = {2, 3};
  cfg.frames = {4, 12};
  const auto corpus = faps::generate_corpus(cfg);
  std::vector<const faps::FapsGroup*> groups;
  for (const auto& g : corpus.groups) groups.push_back(&g);
  encoder::EncoderConfig ec;
  ec.input_dim = 5;
  ec.model_dim = 4;
  const auto identity = encoder::EncoderParams::initialize(ec);
  for (auto pool : {PairPool::kBase, PairPool::kLws, PairPool::kAll}) {
    Rng rng(5);
    const auto r = distance_report(groups, &identity, 200, pool, rng);
    CHECK(r.pair_count == 200);
    CHECK(std::abs(r.reduction_ratio - 1.0) <= 1e-6);
    CHECK(r.mean_pair_distance_origin == r.mean_pair_distance_avenet);
    CHECK(r.reduction_ratio == r.mean_pair_distance_origin / r.mean_pair_distance_avenet);
  }
  Rng rng(6);
  const auto no_enc = distance_report(groups, nullptr, 50, PairPool::kBase, rng);
  CHECK(no_enc.reduction_ratio == 0.0);
  CHECK(no_enc.mav > 0.0);
  CHECK_ERROR_KIND(distance_report(groups, nullptr, 0, PairPool::kBase, rng), ErrorKind::kValidation);
}

TEST_CASE("sample_member_pairs stays within groups and pools") {
  Rng rng(7);
  std::vector<faps::FapsGroup> owned;
  for (int i = 0; i < 5; ++i) owned.push_back(random_group(3, 2, 4, 2, rng));
  std::vector<const faps::FapsGroup*> groups;
  for (const auto& g : owned) groups.push_back(&g);
  for (auto pool : {PairPool::kBase, PairPool::kLws}) {
    for (const auto& [a, b] : sample_member_pairs(groups, pool, 300, rng)) {
      CHECK(a.group == b.group);
      CHECK(a.member != b.member);
      const auto want = pool == PairPool::kBase ? faps::MemberRole::kBase : faps::MemberRole::kLws;
      CHECK(owned[a.group].members[a.member].role == want);
      CHECK(owned[b.group].members[b.member].role == want);
    }
  }
}

}  // TEST_SUITE
