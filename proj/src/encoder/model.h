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

#ifndef AVENET_ENCODER_MODEL_H_
#define AVENET_ENCODER_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "avgfeat/feature_sequence.h"
#include "numerics/params.h"

namespace avenet::encoder {

struct EncoderConfig {
  std::size_t input_dim = 32;
  std::size_t model_dim = 64;
  std::size_t blocks = 2;
  std::size_t attention_heads = 1;
  std::size_t conv_kernel_width = 3;
  std::size_t ffn_expansion = 2;
  bool global_residual = true;
  std::uint64_t seed = 7;

  void validate() const;
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// AVENet weights. Shapes are fully determined by the config. The output
// projection starts at zero, so a fresh encoder is the identity map when
// the global residual is on.
struct EncoderParams {
  EncoderConfig config;
  nn::ParamSet<float> weights;

  static EncoderParams initialize(const EncoderConfig& config);
};

// Declares every tensor of the encoder, in checkpoint order, with its
// initial value.
nn::ParamSet<float> make_encoder_weights(const EncoderConfig& config);

// Builds the encoder graph over a stack of sequences (one Segment each).
// Conformer-lite block: half-step FFN, self-attention, depthwise conv,
// half-step FFN, layer norm.
template <typename T>
nn::Var<T> encoder_forward(const EncoderConfig& config, const nn::ParamSet<T>& weights,
                           const nn::Var<T>& input, std::span<const nn::Segment> segments);

FeatureSequence encode(const EncoderParams& params, const FeatureSequence& input);
// Inference over many sequences at once; output i has the shape of input i.
std::vector<nn::Matrix> encode_batch(const EncoderParams& params,
                                     std::span<const nn::Matrix* const> inputs);

// L_avg: L1 between an encoding and the group's average feature.
template <typename T>
nn::Var<T> avg_loss(const nn::Var<T>& y, const nn::Var<T>& average);
// L_comp: L1 between the encodings of two members of one group.
template <typename T>
nn::Var<T> comp_loss(const nn::Var<T>& y, const nn::Var<T>& y_pos);
// alpha * L_avg(y, average) + beta * L_comp(y, y_pos).
template <typename T>
nn::Var<T> total_loss(const nn::Var<T>& y, const nn::Var<T>& y_pos, const nn::Var<T>& average,
                      double alpha, double beta);

}  // namespace avenet::encoder

#endif  // AVENET_ENCODER_MODEL_H_
