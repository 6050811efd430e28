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

#include "encoder/train.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "avgfeat/stats.h"
#include "common/binary_io.h"
#include "common/error.h"

namespace avenet::encoder {
namespace {

constexpr std::string_view kMagic = "AVN1";
constexpr std::uint64_t kTrainStream = 11;

config::Json checkpoint_config(const EncoderConfig& e, const TrainConfig& t) {
  config::Json j;
  j["kind"] = "avenet-encoder";
  j["encoder"] = to_json(e);
  j["training"] = to_json(t);
  return j;
}

// Log lines strictly before `step` survive a resume.
void truncate_log(const std::filesystem::path& path, std::uint64_t step) {
  std::string kept;
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      unsigned long long logged = 0;
      if (std::sscanf(line.c_str(), "%llu", &logged) != 1) {
        fail(ErrorKind::kParse, path.string() + ": malformed training log line");
      }
      if (logged >= step) break;
      kept += line + "\n";
    }
  }
  write_file(path, kept);
}

}  // namespace

const char* to_string(LrSchedule s) { return s == LrSchedule::kCosine ? "cosine" : "constant"; }

double scheduled_learning_rate(const TrainConfig& cfg, std::uint64_t step) {
  if (cfg.lr_schedule == LrSchedule::kConstant || cfg.steps == 0) return cfg.learning_rate;
  const double progress = std::min(1.0, static_cast<double>(step) / static_cast<double>(cfg.steps));
  return 0.5 * cfg.learning_rate * (1.0 + std::cos(std::numbers::pi * progress));
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) fail(ErrorKind::kConfig, "training: alpha and beta must be >= 0");
  if (batch_size == 0) fail(ErrorKind::kConfig, "training: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorKind::kConfig, "training: learning_rate must be > 0");
  if (log_interval == 0) fail(ErrorKind::kConfig, "training: log_interval must be >= 1");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    fail(ErrorKind::kConfig, "training: holdout_fraction must be in [0, 1)");
  }
}

config::Json to_json(const EncoderConfig& c) {
  config::Json j;
  j["input_dim"] = c.input_dim;
  j["model_dim"] = c.model_dim;
  j["blocks"] = c.blocks;
  j["attention_heads"] = c.attention_heads;
  j["conv_kernel_width"] = c.conv_kernel_width;
  j["ffn_expansion"] = c.ffn_expansion;
  j["global_residual"] = c.global_residual;
  j["seed"] = c.seed;
  return j;
}

EncoderConfig encoder_config_from_json(const config::Json& j, const std::string& path) {
  EncoderConfig c;
  config::FieldReader rd(j, path);
  rd.get("input_dim", c.input_dim);
  rd.get("model_dim", c.model_dim);
  rd.get("blocks", c.blocks);
  rd.get("attention_heads", c.attention_heads);
  rd.get("conv_kernel_width", c.conv_kernel_width);
  rd.get("ffn_expansion", c.ffn_expansion);
  rd.get("global_residual", c.global_residual);
  rd.get("seed", c.seed);
  rd.finish();
  return c;
}

config::Json to_json(const TrainConfig& c) {
  config::Json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["batch_size"] = c.batch_size;
  j["steps"] = c.steps;
  j["learning_rate"] = c.learning_rate;
  j["lr_schedule"] = to_string(c.lr_schedule);
  j["lws_in_training"] = c.lws_in_training;
  j["comp_loss_enabled"] = c.comp_loss_enabled;
  j["checkpoint_interval"] = c.checkpoint_interval;
  j["log_interval"] = c.log_interval;
  j["holdout_fraction"] = c.holdout_fraction;
  j["seed"] = c.seed;
  return j;
}

TrainConfig train_config_from_json(const config::Json& j, const std::string& path) {
  TrainConfig c;
  config::FieldReader rd(j, path);
  rd.get("alpha", c.alpha);
  rd.get("beta", c.beta);
  rd.get("batch_size", c.batch_size);
  rd.get("steps", c.steps);
  rd.get("learning_rate", c.learning_rate);
  std::string schedule = to_string(c.lr_schedule);
  rd.get("lr_schedule", schedule);
  if (schedule == "cosine") {
    c.lr_schedule = LrSchedule::kCosine;
  } else if (schedule == "constant") {
    c.lr_schedule = LrSchedule::kConstant;
  } else {
    fail(ErrorKind::kConfig, "config: " + path + ".lr_schedule must be \"constant\" or \"cosine\"");
  }
  rd.get("lws_in_training", c.lws_in_training);
  rd.get("comp_loss_enabled", c.comp_loss_enabled);
  rd.get("checkpoint_interval", c.checkpoint_interval);
  rd.get("log_interval", c.log_interval);
  rd.get("holdout_fraction", c.holdout_fraction);
  rd.get("seed", c.seed);
  rd.finish();
  return c;
}

std::pair<std::size_t, std::size_t> sample_training_pair(const faps::FapsGroup& group, bool include_lws,
                                                         Rng& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < group.members.size(); ++i) {
    if (include_lws || group.members[i].role == faps::MemberRole::kBase) eligible.push_back(i);
  }
  if (eligible.size() < 2) {
    fail(ErrorKind::kValidation, "group " + std::to_string(group.id) + " has fewer than 2 eligible members");
  }
  const std::size_t a = rng.index(eligible.size());
  std::size_t b = rng.index(eligible.size() - 1);
  if (b >= a) ++b;
  return {eligible[a], eligible[b]};
}

std::string format_log_line(const TrainLogEntry& e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%llu\t%.8f\t%.8f\t%.8f", static_cast<unsigned long long>(e.step),
                e.avg_loss, e.comp_loss, e.total_loss);
  return buf;
}

TrainResult train_encoder(const faps::Corpus& corpus, const EncoderConfig& encoder_config,
                          const TrainConfig& cfg, const TrainOptions& options) {
  encoder_config.validate();
  cfg.validate();
  if (encoder_config.input_dim != corpus.feature_dim()) {
    fail(ErrorKind::kValidation, "train: encoder input_dim " + std::to_string(encoder_config.input_dim) +
                                     " does not match corpus feature_dim " + std::to_string(corpus.feature_dim()));
  }
  const std::size_t train_groups = faps::holdout_begin(corpus.groups.size(), cfg.holdout_fraction);

  TrainResult result{EncoderParams::initialize(encoder_config), {}, {}};
  auto& weights = result.params.weights;
  nn::AdamOptions adam_opts;
  adam_opts.learning_rate = cfg.learning_rate;
  result.state.adam = nn::AdamState<float>(weights.vars(), adam_opts);

  if (options.resume) {
    if (options.checkpoint_path.empty()) fail(ErrorKind::kUsage, "train: resume needs a checkpoint path");
    auto ckpt = load_checkpoint(options.checkpoint_path);
    if (!(ckpt.params.config == encoder_config)) {
      fail(ErrorKind::kConfig, "train: checkpoint encoder config differs from the requested one");
    }
    TrainConfig a = ckpt.training, b = cfg;
    a.checkpoint_interval = b.checkpoint_interval = 0;
    if (!(a == b)) fail(ErrorKind::kConfig, "train: checkpoint training config differs from the requested one");
    if (!ckpt.state) fail(ErrorKind::kUsage, "train: checkpoint carries no optimizer state");
    result.params = std::move(ckpt.params);
    result.state = std::move(*ckpt.state);
  }
  if (!options.log_path.empty()) truncate_log(options.log_path, result.state.step);
  std::ofstream log_file;
  if (!options.log_path.empty()) {
    log_file.open(options.log_path, std::ios::app | std::ios::binary);
    if (!log_file) fail(ErrorKind::kIo, "train: cannot open log " + options.log_path.string());
  }

  std::vector<nn::Matrix> averages(train_groups);
  for (std::size_t g = 0; g < train_groups; ++g) averages[g] = average_feature(corpus.groups[g]).values();

  auto save = [&] {
    if (options.checkpoint_path.empty()) return;
    save_checkpoint({result.params, cfg, result.state}, options.checkpoint_path);
  };

  const auto params = result.params.weights.vars();
  for (std::uint64_t step = result.state.step; step < cfg.steps; ++step) {
    Rng rng = Rng::derive(cfg.seed, {kTrainStream, step});
    result.state.adam.options.learning_rate = scheduled_learning_rate(cfg, step);
    const std::size_t n = cfg.batch_size;
    std::vector<const nn::Matrix*> inputs(2 * n);
    std::vector<const nn::Matrix*> targets(2 * n);
    std::vector<nn::Segment> segments(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t g = rng.index(train_groups);
      const auto [a, b] = sample_training_pair(corpus.groups[g], cfg.lws_in_training, rng);
      inputs[i] = &corpus.groups[g].members[a].features.values();
      inputs[n + i] = &corpus.groups[g].members[b].features.values();
      targets[i] = targets[n + i] = &averages[g];
    }
    std::size_t offset = 0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      segments[i] = {offset, inputs[i]->rows()};
      offset += inputs[i]->rows();
    }
    const std::size_t half_rows = segments[n].begin;

    auto x = nn::constant(nn::vstack<float>(inputs));
    auto y = encoder_forward(encoder_config, result.params.weights, x, segments);
    auto l_avg = avg_loss(y, nn::constant(nn::vstack<float>(targets)));
    auto l_comp = comp_loss(nn::slice_rows(y, 0, half_rows), nn::slice_rows(y, half_rows, half_rows));
    auto total = nn::scale(l_avg, cfg.alpha);
    if (cfg.comp_loss_enabled) total = nn::add(total, nn::scale(l_comp, cfg.beta));

    const TrainLogEntry entry{step, l_avg->value[0], l_comp->value[0], total->value[0]};
    if (!std::isfinite(entry.total_loss) || !std::isfinite(entry.comp_loss)) {
      fail(ErrorKind::kNumeric, "train: non-finite loss at step " + std::to_string(step) + " (L_avg " +
                                    std::to_string(entry.avg_loss) + ", L_comp " + std::to_string(entry.comp_loss) +
                                    ", L_total " + std::to_string(entry.total_loss) + ")");
    }
    if (step % cfg.log_interval == 0) {
      result.log.push_back(entry);
      if (log_file) log_file << format_log_line(entry) << '\n' << std::flush;
      if (options.on_log) options.on_log(entry);
    }
    nn::backward(total);
    nn::adam_step(params, result.state.adam);
    result.state.step = step + 1;
    if (cfg.checkpoint_interval > 0 && result.state.step % cfg.checkpoint_interval == 0 &&
        result.state.step < cfg.steps) {
      save();
    }
  }
  for (const auto& p : params) {
    if (!p->value.all_finite()) fail(ErrorKind::kNumeric, "train: parameters became non-finite");
  }
  save();
  return result;
}

std::string encode_checkpoint(const EncoderCheckpoint& ckpt) {
  nn::ParamFile file{checkpoint_config(ckpt.params.config, ckpt.training).dump(), ckpt.params.weights.clone(),
                     ckpt.state};
  return nn::encode_param_file(kMagic, file);
}

EncoderCheckpoint decode_checkpoint(std::string_view bytes, const std::string& context) {
  config::Json j;
  try {
    j = config::Json::parse(nn::peek_param_file_config(kMagic, bytes, context));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, context + ": config echo is not valid JSON: " + e.what());
  }
  EncoderCheckpoint ckpt;
  try {
    if (j.at("kind") != "avenet-encoder") fail(ErrorKind::kFormat, context + ": not an encoder checkpoint");
    ckpt.params.config = encoder_config_from_json(j.at("encoder"));
    ckpt.training = train_config_from_json(j.at("training"));
    ckpt.params.config.validate();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, context + ": " + e.what());
  } catch (const Error& e) {
    fail(ErrorKind::kFormat, context + ": " + e.what());
  }
  auto file = nn::decode_param_file(kMagic, bytes, context, make_encoder_weights(ckpt.params.config));
  ckpt.params.weights = std::move(file.weights);
  ckpt.state = std::move(file.state);
  return ckpt;
}

void save_checkpoint(const EncoderCheckpoint& ckpt, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(ckpt));
}

EncoderCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

}  // namespace avenet::encoder
