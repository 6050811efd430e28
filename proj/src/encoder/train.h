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

#ifndef AVENET_ENCODER_TRAIN_H_
#define AVENET_ENCODER_TRAIN_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "config/json_fields.h"
#include "encoder/model.h"
#include "faps/corpus.h"
#include "numerics/param_file.h"

namespace avenet::encoder {

enum class LrSchedule { kConstant, kCosine };
const char* to_string(LrSchedule s);

struct TrainConfig {
  double alpha = 1.0;
  double beta = 0.5;
  std::size_t batch_size = 16;
  std::uint64_t steps = 20000;
  double learning_rate = 1e-3;
  // kCosine anneals from learning_rate to 0 over `steps`.
  LrSchedule lr_schedule = LrSchedule::kCosine;
  bool lws_in_training = true;
  bool comp_loss_enabled = true;
  std::uint64_t checkpoint_interval = 5000;
  std::uint64_t log_interval = 100;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

config::Json to_json(const EncoderConfig& cfg);
EncoderConfig encoder_config_from_json(const config::Json& j, const std::string& path = "encoder");
config::Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const config::Json& j, const std::string& path = "training");

double scheduled_learning_rate(const TrainConfig& cfg, std::uint64_t step);

// Two distinct member indices, uniformly without replacement, in random
// order. LWS members are eligible only when `include_lws`.
std::pair<std::size_t, std::size_t> sample_training_pair(const faps::FapsGroup& group, bool include_lws,
                                                         Rng& rng);

struct TrainLogEntry {
  std::uint64_t step = 0;
  double avg_loss = 0.0;
  double comp_loss = 0.0;
  double total_loss = 0.0;
};
std::string format_log_line(const TrainLogEntry& e);

struct TrainOptions {
  std::filesystem::path checkpoint_path;  // empty: no checkpoints
  std::filesystem::path log_path;         // empty: no log file
  bool resume = false;                    // continue from checkpoint_path
  std::function<void(const TrainLogEntry&)> on_log;
};

struct TrainResult {
  EncoderParams params;
  nn::TrainState state;
  std::vector<TrainLogEntry> log;
};

// Each step draws a batch of training groups and one pair per group; the
// pair is encoded together, both encodings are pulled to the group average
// (L_avg) and towards each other (L_comp). Step k uses its own random
// stream derived from (seed, k), so a resumed run continues identically.
TrainResult train_encoder(const faps::Corpus& corpus, const EncoderConfig& encoder_config,
                          const TrainConfig& train_config, const TrainOptions& options = {});

// AVN1 checkpoints.
struct EncoderCheckpoint {
  EncoderParams params;
  TrainConfig training;
  std::optional<nn::TrainState> state;
};
std::string encode_checkpoint(const EncoderCheckpoint& ckpt);
EncoderCheckpoint decode_checkpoint(std::string_view bytes, const std::string& context = "AVN1");
void save_checkpoint(const EncoderCheckpoint& ckpt, const std::filesystem::path& path);
EncoderCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace avenet::encoder

#endif  // AVENET_ENCODER_TRAIN_H_
