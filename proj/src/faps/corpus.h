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

#ifndef AVENET_FAPS_CORPUS_H_
#define AVENET_FAPS_CORPUS_H_

#include <filesystem>
#include <functional>
#include <vector>

#include "config/json_fields.h"
#include "faps/faps.h"

namespace avenet::faps {

struct CorpusConfig {
  std::size_t groups = 2000;
  std::size_t base_speakers = 8;
  std::size_t lws_members = 8;
  std::size_t feature_dim = 32;
  std::size_t content_dim = 12;
  std::size_t speaker_dim = 8;
  std::size_t phonemes = 40;
  IntRange script_length{6, 14};
  IntRange phoneme_duration{2, 6};
  IntRange frames{20, 60};
  IntRange blend_arity{2, 3};
  double drift_bound = 0.05;
  double speaker_scale = 1.0;
  double interaction_strength = 0.2;
  double noise_std = 0.02;
  double frame_hop_seconds = 0.02;
  std::uint64_t seed = 1;

  void validate() const;
  friend bool operator==(const CorpusConfig&, const CorpusConfig&) = default;
};

config::Json to_json(const CorpusConfig& cfg);
CorpusConfig corpus_config_from_json(const config::Json& j, const std::string& path = "corpus");

// Hidden generator state shared by all groups of one corpus.
struct GeneratorWorld {
  nn::Matrix phoneme_codes;  // P x C
  MixingModel mix;
  std::vector<SpeakerEmbedding> base_speakers;

  static GeneratorWorld create(const CorpusConfig& cfg);
};

struct Corpus {
  CorpusConfig config;
  std::vector<SpeakerEmbedding> base_speakers;
  std::vector<FapsGroup> groups;

  std::size_t feature_dim() const { return config.feature_dim; }
};

// Group g is generated from its own stream derived from (seed, g), so the
// result does not depend on `threads`.
FapsGroup generate_group(const CorpusConfig& cfg, const GeneratorWorld& world, std::uint32_t id);
Corpus generate_corpus(const CorpusConfig& cfg, unsigned threads = 1);

// Directory layout: manifest.json plus groups/<id>/ holding script.tsv and,
// per member, <speaker>.fpk and <speaker>.tsv (phoneme intervals).
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, unsigned threads = 1);
Corpus load_corpus(const std::filesystem::path& dir, unsigned threads = 1);

std::filesystem::path member_feature_path(const FapsGroup& g, const FapsMember& m);
std::filesystem::path member_interval_path(const FapsGroup& g, const FapsMember& m);

// Index of the first held-out group: the last `fraction` of the groups are
// held out, with at least one group on each side when 0 < fraction < 1.
std::size_t holdout_begin(std::size_t group_count, double fraction);

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace avenet::faps

#endif  // AVENET_FAPS_CORPUS_H_
