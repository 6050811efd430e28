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

#ifndef AVENET_FAPS_FAPS_H_
#define AVENET_FAPS_FAPS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "align/intervals.h"
#include "avgfeat/feature_sequence.h"
#include "numerics/rng.h"

namespace avenet::faps {

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct ScriptEntry {
  std::uint32_t phoneme = 0;
  std::uint32_t duration = 1;  // frames
  friend bool operator==(const ScriptEntry&, const ScriptEntry&) = default;
};

// Phoneme sequence with frame durations. The durations are drawn once and
// shared by every speaker rendered from the script.
struct PhonemeScript {
  std::vector<ScriptEntry> entries;

  std::size_t total_frames() const;
  void validate() const;
  friend bool operator==(const PhonemeScript&, const PhonemeScript&) = default;
};

PhonemeScript sample_script(Rng& rng, std::size_t phoneme_inventory, IntRange length,
                            IntRange duration);

std::string phoneme_label(std::uint32_t phoneme);

enum class MemberRole : std::uint8_t { kBase = 0, kLws = 1 };
const char* to_string(MemberRole role);

struct SpeakerEmbedding {
  std::string id;
  std::vector<float> vector;
  // For blended speakers: indices of the base speakers and their weights.
  std::vector<std::uint32_t> sources;
  std::vector<double> weights;

  bool blended() const { return !sources.empty(); }
};

// spk = sum_i w_i * spk_i. Weights must be non-negative and sum to 1.
SpeakerEmbedding blend_speakers(std::span<const double> weights,
                                std::span<const SpeakerEmbedding* const> embeddings);

// Frozen generator maps. Rows of content_map are indexed by content
// dimension, rows of interaction_map by (content index * S + speaker index).
struct MixingModel {
  nn::Matrix content_map;      // C x D
  nn::Matrix speaker_map;      // S x D
  nn::Matrix interaction_map;  // C*S x D
  double interaction_strength = 0.0;
  double noise_std = 0.0;

  std::size_t content_dim() const { return content_map.rows(); }
  std::size_t speaker_dim() const { return speaker_map.rows(); }
  std::size_t feature_dim() const { return content_map.cols(); }

  static MixingModel sample(std::size_t content_dim, std::size_t speaker_dim,
                            std::size_t feature_dim, double speaker_scale,
                            double interaction_strength, double noise_std, Rng& rng);
};

// T x C content latents: each phoneme's code held over its duration with a
// bounded random walk on top. Any two frames of one phoneme differ by at
// most `drift_bound` per coordinate.
nn::Matrix expand_content(const PhonemeScript& script, const nn::Matrix& phoneme_codes,
                          double drift_bound, Rng& rng);

// F_t = W_c c_t + W_s s + gamma W_x (c_t (x) s) + sigma eps_t.
FeatureSequence render_features(const nn::Matrix& content, const SpeakerEmbedding& speaker,
                                const MixingModel& mix, Rng& rng);

struct FapsMember {
  SpeakerEmbedding speaker;
  MemberRole role = MemberRole::kBase;
  FeatureSequence features;
};

struct FapsGroup {
  std::uint32_t id = 0;
  PhonemeScript script;
  std::vector<FapsMember> members;

  std::size_t frames() const { return script.total_frames(); }
  std::size_t base_count() const;
  // Frame alignment and the two-base-member minimum.
  void validate() const;
};

FapsGroup make_faps_group(std::uint32_t id, const PhonemeScript& script, const nn::Matrix& content,
                          std::span<const SpeakerEmbedding> base_speakers, std::size_t lws_count,
                          IntRange blend_arity, const MixingModel& mix, Rng& rng);

align::IntervalSequence export_intervals(const PhonemeScript& script, double frame_hop_seconds);

}  // namespace avenet::faps

#endif  // AVENET_FAPS_FAPS_H_
