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

#ifndef AVENET_VC_DECODER_H_
#define AVENET_VC_DECODER_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "encoder/train.h"

namespace avenet::vc {

struct DecoderConfig {
  std::size_t feature_dim = 32;
  std::size_t speaker_dim = 8;
  std::size_t hidden_dim = 64;
  std::uint64_t seed = 5;

  void validate() const;
  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

struct DecoderTrainConfig {
  std::uint64_t steps = 5000;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  std::uint64_t checkpoint_interval = 1000;
  std::uint64_t log_interval = 100;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 3;

  void validate() const;
  friend bool operator==(const DecoderTrainConfig&, const DecoderTrainConfig&) = default;
};

config::Json to_json(const DecoderConfig& cfg);
DecoderConfig decoder_config_from_json(const config::Json& j, const std::string& path = "decoder");
config::Json to_json(const DecoderTrainConfig& cfg);
DecoderTrainConfig decoder_train_config_from_json(const config::Json& j,
                                                  const std::string& path = "decoder_training");

// Content path Y -> H, speaker path s -> (shift, gain) in H, fused as
// h1 = gelu(h + shift + h * gain), one residual feed-forward layer, and an
// output projection added back onto Y. The output projection starts at
// zero, so a fresh decoder returns its content input.
struct DecoderParams {
  DecoderConfig config;
  nn::ParamSet<float> weights;

  static DecoderParams initialize(const DecoderConfig& config);
};

nn::ParamSet<float> make_decoder_weights(const DecoderConfig& config);

// `speakers` has one row per content row.
template <typename T>
nn::Var<T> decoder_forward(const DecoderConfig& config, const nn::ParamSet<T>& weights,
                           const nn::Var<T>& content, const nn::Var<T>& speakers);

nn::Matrix decode(const DecoderParams& decoder, const nn::Matrix& content, std::span<const float> speaker);

// decode(encode(source), target speaker).
FeatureSequence convert(const DecoderParams& decoder, const encoder::EncoderParams& encoder,
                        const FeatureSequence& source, std::span<const float> target_speaker);

// Swap test on held-out base pairs: factor = L1(src, tgt) / L1(convert(src,
// spk_tgt), tgt); a pair improves when the factor exceeds 1.
struct ConversionReport {
  std::size_t pair_count = 0;
  double improved_fraction = 0.0;
  double median_improvement_factor = 0.0;
  double mean_l1_unconverted = 0.0;
  double mean_l1_converted = 0.0;
};

ConversionReport conversion_oracle(const faps::Corpus& corpus, const encoder::EncoderParams& encoder,
                                   const DecoderParams& decoder, std::size_t pair_count,
                                   double holdout_fraction, std::uint64_t seed);

struct DecoderTrainResult {
  DecoderParams params;
  nn::TrainState state;
  std::vector<encoder::TrainLogEntry> log;  // comp_loss unused (0)
};

struct DecoderTrainOptions {
  std::filesystem::path checkpoint_path;
  std::filesystem::path log_path;
  std::function<void(const encoder::TrainLogEntry&)> on_log;
};

// Reconstruction training: L1(decode(encode(F_i), spk_i), F_i) over every
// member of the training groups. The encoder is only read.
DecoderTrainResult train_decoder(const faps::Corpus& corpus, const encoder::EncoderParams& encoder,
                                 const DecoderConfig& config, const DecoderTrainConfig& train_config,
                                 const DecoderTrainOptions& options = {});

// VCL1 checkpoints.
struct DecoderCheckpoint {
  DecoderParams params;
  DecoderTrainConfig training;
  std::optional<nn::TrainState> state;
};
std::string encode_decoder_checkpoint(const DecoderCheckpoint& ckpt);
DecoderCheckpoint decode_decoder_checkpoint(std::string_view bytes, const std::string& context = "VCL1");
void save_decoder_checkpoint(const DecoderCheckpoint& ckpt, const std::filesystem::path& path);
DecoderCheckpoint load_decoder_checkpoint(const std::filesystem::path& path);

}  // namespace avenet::vc

#endif  // AVENET_VC_DECODER_H_
