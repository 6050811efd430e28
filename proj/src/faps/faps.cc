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

#include "faps/faps.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "common/error.h"

namespace avenet::faps {

std::size_t PhonemeScript::total_frames() const {
  std::size_t t = 0;
  for (const auto& e : entries) t += e.duration;
  return t;
}

void PhonemeScript::validate() const {
  if (entries.empty()) fail(ErrorKind::kValidation, "script has no phonemes");
  for (const auto& e : entries) {
    if (e.duration == 0) fail(ErrorKind::kValidation, "script has a zero-length phoneme");
  }
}

PhonemeScript sample_script(Rng& rng, std::size_t phoneme_inventory, IntRange length,
                            IntRange duration) {
  if (phoneme_inventory < 2) fail(ErrorKind::kConfig, "sample_script: need at least 2 phonemes");
  if (length.lo < 1 || length.lo > length.hi) {
    fail(ErrorKind::kConfig, "sample_script: bad length range");
  }
  if (duration.lo < 1 || duration.lo > duration.hi) {
    fail(ErrorKind::kConfig, "sample_script: bad duration range");
  }
  PhonemeScript script;
  const auto n = rng.uniform_int(length.lo, length.hi);
  script.entries.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const auto p = static_cast<std::uint32_t>(rng.index(phoneme_inventory));
    const auto d = static_cast<std::uint32_t>(rng.uniform_int(duration.lo, duration.hi));
    script.entries.push_back({p, d});
  }
  return script;
}

std::string phoneme_label(std::uint32_t phoneme) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%02u", phoneme);
  return buf;
}

const char* to_string(MemberRole role) { return role == MemberRole::kBase ? "base" : "lws"; }

SpeakerEmbedding blend_speakers(std::span<const double> weights,
                                std::span<const SpeakerEmbedding* const> embeddings) {
  if (weights.empty() || weights.size() != embeddings.size()) {
    fail(ErrorKind::kValidation, "blend_speakers: need one weight per embedding");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::kValidation, "blend_speakers: weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    fail(ErrorKind::kValidation, "blend_speakers: weights sum to " + std::to_string(sum) + ", not 1");
  }
  const std::size_t s = embeddings.front()->vector.size();
  for (const auto* e : embeddings) {
    if (e->vector.size() != s) fail(ErrorKind::kValidation, "blend_speakers: dimension mismatch");
  }
  SpeakerEmbedding out;
  out.vector.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * embeddings[i]->vector[j];
    out.vector[j] = static_cast<float>(acc);
  }
  out.weights.assign(weights.begin(), weights.end());
  return out;
}

MixingModel MixingModel::sample(std::size_t c, std::size_t s, std::size_t d, double speaker_scale,
                                double interaction_strength, double noise_std, Rng& rng) {
  if (c == 0 || s == 0 || d == 0) fail(ErrorKind::kConfig, "mixing model: dimensions must be >= 1");
  if (interaction_strength < 0.0 || noise_std < 0.0 || speaker_scale < 0.0) {
    fail(ErrorKind::kConfig, "mixing model: strengths must be non-negative");
  }
  auto gaussian = [&rng](std::size_t rows, std::size_t cols, double stddev) {
    nn::Matrix m(rows, cols);
    for (auto& v : m.data()) v = static_cast<float>(stddev * rng.normal());
    return m;
  };
  MixingModel mix;
  mix.content_map = gaussian(c, d, 1.0 / std::sqrt(double(c)));
  mix.speaker_map = gaussian(s, d, speaker_scale / std::sqrt(double(s)));
  mix.interaction_map = gaussian(c * s, d, 1.0 / std::sqrt(double(c * s)));
  mix.interaction_strength = interaction_strength;
  mix.noise_std = noise_std;
  return mix;
}

nn::Matrix expand_content(const PhonemeScript& script, const nn::Matrix& phoneme_codes,
                          double drift_bound, Rng& rng) {
  script.validate();
  if (drift_bound < 0.0) fail(ErrorKind::kConfig, "expand_content: negative drift bound");
  const std::size_t c = phoneme_codes.cols();
  nn::Matrix out(script.total_frames(), c);
  const double half = drift_bound / 2.0;
  std::vector<double> drift(c);
  std::size_t t = 0;
  for (const auto& e : script.entries) {
    if (e.phoneme >= phoneme_codes.rows()) {
      fail(ErrorKind::kConfig, "expand_content: phoneme id outside the inventory");
    }
    std::fill(drift.begin(), drift.end(), 0.0);
    for (std::uint32_t k = 0; k < e.duration; ++k, ++t) {
      for (std::size_t j = 0; j < c; ++j) {
        if (k > 0) drift[j] = std::clamp(drift[j] + rng.uniform(-half, half), -half, half);
        out(t, j) = static_cast<float>(phoneme_codes(e.phoneme, j) + drift[j]);
      }
    }
  }
  return out;
}

FeatureSequence render_features(const nn::Matrix& content, const SpeakerEmbedding& speaker,
                                const MixingModel& mix, Rng& rng) {
  const std::size_t c = mix.content_dim();
  const std::size_t s = mix.speaker_dim();
  const std::size_t d = mix.feature_dim();
  if (content.cols() != c) fail(ErrorKind::kConfig, "render_features: content dimension mismatch");
  if (speaker.vector.size() != s) fail(ErrorKind::kConfig, "render_features: speaker dimension mismatch");

  // Per-utterance constants: W_s s and M = W_c + gamma * sum_j s_j W_x[i*S + j].
  std::vector<double> offset(d, 0.0);
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t k = 0; k < d; ++k) offset[k] += double(speaker.vector[j]) * mix.speaker_map(j, k);
  }
  nn::MatrixD m(c, d);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double x = 0.0;
      for (std::size_t j = 0; j < s; ++j) x += double(speaker.vector[j]) * mix.interaction_map(i * s + j, k);
      m(i, k) = mix.content_map(i, k) + mix.interaction_strength * x;
    }
  }

  nn::Matrix out(content.rows(), d);
  for (std::size_t t = 0; t < content.rows(); ++t) {
    for (std::size_t k = 0; k < d; ++k) {
      double v = offset[k];
      for (std::size_t i = 0; i < c; ++i) v += double(content(t, i)) * m(i, k);
      if (mix.noise_std > 0.0) v += mix.noise_std * rng.normal();
      out(t, k) = static_cast<float>(v);
    }
  }
  return FeatureSequence(std::move(out), Provenance::kRaw);
}

std::size_t FapsGroup::base_count() const {
  return static_cast<std::size_t>(std::count_if(
      members.begin(), members.end(), [](const FapsMember& m) { return m.role == MemberRole::kBase; }));
}

void FapsGroup::validate() const {
  if (base_count() < 2) {
    fail(ErrorKind::kValidation, "group " + std::to_string(id) + " has fewer than 2 base members");
  }
  const std::size_t t = frames();
  const std::size_t d = members.front().features.dim();
  for (const auto& m : members) {
    if (m.features.frames() != t || m.features.dim() != d) {
      fail(ErrorKind::kValidation, "group " + std::to_string(id) + ": member " + m.speaker.id +
                                       " is not frame-aligned with the script");
    }
  }
}

FapsGroup make_faps_group(std::uint32_t id, const PhonemeScript& script, const nn::Matrix& content,
                          std::span<const SpeakerEmbedding> base_speakers, std::size_t lws_count,
                          IntRange blend_arity, const MixingModel& mix, Rng& rng) {
  if (base_speakers.size() < 2) fail(ErrorKind::kConfig, "make_faps_group: need >= 2 base speakers");
  if (content.rows() != script.total_frames()) {
    fail(ErrorKind::kValidation, "make_faps_group: content length differs from the script");
  }
  if (lws_count > 0 && (blend_arity.lo < 1 || blend_arity.lo > blend_arity.hi)) {
    fail(ErrorKind::kConfig, "make_faps_group: bad blend arity range");
  }
  FapsGroup group;
  group.id = id;
  group.script = script;
  for (const auto& spk : base_speakers) {
    group.members.push_back({spk, MemberRole::kBase, render_features(content, spk, mix, rng)});
  }
  const auto max_arity = static_cast<std::int64_t>(base_speakers.size());
  for (std::size_t l = 0; l < lws_count; ++l) {
    const auto arity = static_cast<std::size_t>(
        rng.uniform_int(std::min(blend_arity.lo, max_arity), std::min(blend_arity.hi, max_arity)));
    // Partial Fisher-Yates for distinct sources, Dirichlet(1) weights via
    // normalised exponentials.
    std::vector<std::uint32_t> order(base_speakers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < arity; ++i) {
      std::swap(order[i], order[i + rng.index(order.size() - i)]);
    }
    std::vector<std::uint32_t> sources(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(arity));
    std::vector<double> weights(arity);
    double total = 0.0;
    for (auto& w : weights) {
      w = -std::log(1.0 - rng.uniform());
      total += w;
    }
    for (auto& w : weights) w /= total;
    std::vector<const SpeakerEmbedding*> picked;
    for (auto src : sources) picked.push_back(&base_speakers[src]);
    SpeakerEmbedding blend = blend_speakers(weights, picked);
    blend.sources = std::move(sources);
    blend.id = "g" + std::to_string(id) + "-lws" + std::to_string(l);
    group.members.push_back({blend, MemberRole::kLws, render_features(content, blend, mix, rng)});
  }
  group.validate();
  return group;
}

align::IntervalSequence export_intervals(const PhonemeScript& script, double frame_hop_seconds) {
  if (!(frame_hop_seconds > 0.0)) fail(ErrorKind::kConfig, "export_intervals: frame hop must be > 0");
  std::vector<align::PhonemeInterval> out;
  std::size_t frames = 0;
  const double hop_us = frame_hop_seconds * 1e6;
  for (const auto& e : script.entries) {
    const auto start = std::llround(static_cast<double>(frames) * hop_us);
    frames += e.duration;
    const auto end = std::llround(static_cast<double>(frames) * hop_us);
    out.push_back({phoneme_label(e.phoneme), start, end});
  }
  return align::IntervalSequence(std::move(out));
}

}  // namespace avenet::faps
