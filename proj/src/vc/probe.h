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

#ifndef AVENET_VC_PROBE_H_
#define AVENET_VC_PROBE_H_

#include <string>

#include "avgfeat/stats.h"
#include "encoder/train.h"

namespace avenet::vc {

struct ProbeConfig {
  std::uint64_t steps = 1500;
  std::size_t batch_size = 256;
  double learning_rate = 1e-2;
  double weight_decay = 1e-4;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 13;

  void validate() const;
  friend bool operator==(const ProbeConfig&, const ProbeConfig&) = default;
};

config::Json to_json(const ProbeConfig& cfg);
ProbeConfig probe_config_from_json(const config::Json& j, const std::string& path = "probe");

enum class Representation { kRaw, kAvenet };
const char* to_string(Representation r);

// Linear map from a standardised frame to base-speaker logits.
struct SpeakerProbe {
  nn::Matrix mean;    // 1 x D
  nn::Matrix scale;   // 1 x D, reciprocal standard deviations
  nn::Matrix weight;  // D x K
  nn::Matrix bias;    // 1 x K

  std::size_t predict(std::span<const float> frame) const;
};

struct ProbeResult {
  SpeakerProbe probe;
  double accuracy = 0.0;
  double chance = 0.0;
  std::size_t classes = 0;
  std::size_t train_frames = 0;
  std::size_t test_frames = 0;
};

// Trained on every frame of the base members of the training groups and
// scored on the base members of the held-out groups. `shuffle_labels`
// permutes the training labels (control run).
ProbeResult train_probe(const faps::Corpus& corpus, Representation representation,
                        const encoder::EncoderParams* encoder, const ProbeConfig& config,
                        bool shuffle_labels = false);

struct UnseenSpeakerVariant {
  std::string name;
  encoder::TrainConfig training;
  DistanceReport distance;  // held-out LWS-LWS pairs
  // Probe trained on base speakers, scored on held-out LWS frames against
  // each blend's largest-weight source.
  double probe_accuracy = 0.0;
};

struct UnseenSpeakerReport {
  UnseenSpeakerVariant with_lws;
  UnseenSpeakerVariant without_lws;
};

UnseenSpeakerReport probe_unseen_speakers(const faps::Corpus& corpus, const encoder::EncoderCheckpoint* with_lws,
                                          const encoder::EncoderCheckpoint* without_lws,
                                          const ProbeConfig& config, std::size_t pair_count,
                                          std::uint64_t seed);

}  // namespace avenet::vc

#endif  // AVENET_VC_PROBE_H_
