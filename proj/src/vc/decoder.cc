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

#include "vc/decoder.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>

#include "common/binary_io.h"
#include "avgfeat/stats.h"
#include "common/error.h"

namespace avenet::vc {
namespace {

constexpr std::string_view kMagic = "VCL1";
constexpr std::uint64_t kDecoderStream = 21;

nn::Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  nn::Matrix m(rows, cols);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(rows));
  for (auto& v : m.data()) v = static_cast<float>(stddev * rng.normal());
  return m;
}

nn::Matrix speaker_rows(std::span<const float> speaker, std::size_t rows) {
  nn::Matrix m(rows, speaker.size());
  for (std::size_t r = 0; r < rows; ++r) std::copy(speaker.begin(), speaker.end(), m.row(r).begin());
  return m;
}

// Encodes sequences in fixed-size chunks.
std::vector<nn::Matrix> encode_all(const encoder::EncoderParams& enc, std::span<const nn::Matrix* const> inputs) {
  std::vector<nn::Matrix> out;
  out.reserve(inputs.size());
  constexpr std::size_t kChunk = 64;
  for (std::size_t i = 0; i < inputs.size(); i += kChunk) {
    const auto n = std::min(kChunk, inputs.size() - i);
    for (auto& m : encoder::encode_batch(enc, inputs.subspan(i, n))) out.push_back(std::move(m));
  }
  return out;
}

config::Json checkpoint_config(const DecoderConfig& d, const DecoderTrainConfig& t) {
  config::Json j;
  j["kind"] = "avenet-decoder";
  j["decoder"] = to_json(d);
  j["training"] = to_json(t);
  return j;
}

}  // namespace

void DecoderConfig::validate() const {
  if (feature_dim == 0 || speaker_dim == 0 || hidden_dim == 0) {
    fail(ErrorKind::kConfig, "decoder: dimensions must be >= 1");
  }
}

void DecoderTrainConfig::validate() const {
  if (batch_size == 0) fail(ErrorKind::kConfig, "decoder_training: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorKind::kConfig, "decoder_training: learning_rate must be > 0");
  if (log_interval == 0) fail(ErrorKind::kConfig, "decoder_training: log_interval must be >= 1");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    fail(ErrorKind::kConfig, "decoder_training: holdout_fraction must be in [0, 1)");
  }
}

config::Json to_json(const DecoderConfig& c) {
  config::Json j;
  j["feature_dim"] = c.feature_dim;
  j["speaker_dim"] = c.speaker_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["seed"] = c.seed;
  return j;
}

DecoderConfig decoder_config_from_json(const config::Json& j, const std::string& path) {
  DecoderConfig c;
  config::FieldReader rd(j, path);
  rd.get("feature_dim", c.feature_dim);
  rd.get("speaker_dim", c.speaker_dim);
  rd.get("hidden_dim", c.hidden_dim);
  rd.get("seed", c.seed);
  rd.finish();
  return c;
}

config::Json to_json(const DecoderTrainConfig& c) {
  config::Json j;
  j["steps"] = c.steps;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["checkpoint_interval"] = c.checkpoint_interval;
  j["log_interval"] = c.log_interval;
  j["holdout_fraction"] = c.holdout_fraction;
  j["seed"] = c.seed;
  return j;
}

DecoderTrainConfig decoder_train_config_from_json(const config::Json& j, const std::string& path) {
  DecoderTrainConfig c;
  config::FieldReader rd(j, path);
  rd.get("steps", c.steps);
  rd.get("batch_size", c.batch_size);
  rd.get("learning_rate", c.learning_rate);
  rd.get("checkpoint_interval", c.checkpoint_interval);
  rd.get("log_interval", c.log_interval);
  rd.get("holdout_fraction", c.holdout_fraction);
  rd.get("seed", c.seed);
  rd.finish();
  return c;
}

nn::ParamSet<float> make_decoder_weights(const DecoderConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t d = cfg.feature_dim, s = cfg.speaker_dim, h = cfg.hidden_dim;
  nn::ParamSet<float> w;
  w.add("content.w", gaussian(d, h, rng));
  w.add("content.b", nn::Matrix(1, h));
  w.add("shift.w", gaussian(s, h, rng));
  w.add("shift.b", nn::Matrix(1, h));
  w.add("gain.w", gaussian(s, h, rng));
  w.add("gain.b", nn::Matrix(1, h));
  w.add("ffn.w1", gaussian(h, h, rng));
  w.add("ffn.b1", nn::Matrix(1, h));
  w.add("ffn.w2", gaussian(h, h, rng));
  w.add("ffn.b2", nn::Matrix(1, h));
  w.add("out.w", nn::Matrix(h, d));
  w.add("out.b", nn::Matrix(1, d));
  return w;
}

DecoderParams DecoderParams::initialize(const DecoderConfig& config) {
  return DecoderParams{config, make_decoder_weights(config)};
}

template <typename T>
nn::Var<T> decoder_forward(const DecoderConfig& cfg, const nn::ParamSet<T>& w, const nn::Var<T>& content,
                           const nn::Var<T>& speakers) {
  if (content->value.cols() != cfg.feature_dim) fail(ErrorKind::kValidation, "decoder: content dimension mismatch");
  if (speakers->value.cols() != cfg.speaker_dim) fail(ErrorKind::kValidation, "decoder: speaker dimension mismatch");
  if (speakers->value.rows() != content->value.rows()) {
    fail(ErrorKind::kValidation, "decoder: need one speaker row per content row");
  }
  auto h = nn::add(nn::matmul(content, w["content.w"]), w["content.b"]);
  auto shift = nn::add(nn::matmul(speakers, w["shift.w"]), w["shift.b"]);
  auto gain = nn::add(nn::matmul(speakers, w["gain.w"]), w["gain.b"]);
  auto h1 = nn::gelu(nn::add(nn::add(h, shift), nn::mul(h, gain)));
  auto f = nn::gelu(nn::add(nn::matmul(h1, w["ffn.w1"]), w["ffn.b1"]));
  auto h2 = nn::add(h1, nn::add(nn::matmul(f, w["ffn.w2"]), w["ffn.b2"]));
  return nn::add(content, nn::add(nn::matmul(h2, w["out.w"]), w["out.b"]));
}

nn::Matrix decode(const DecoderParams& dec, const nn::Matrix& content, std::span<const float> speaker) {
  if (speaker.size() != dec.config.speaker_dim) {
    fail(ErrorKind::kValidation, "decode: speaker embedding has dimension " + std::to_string(speaker.size()) +
                                     ", decoder expects " + std::to_string(dec.config.speaker_dim));
  }
  nn::NoGradGuard no_grad;
  auto out = decoder_forward(dec.config, dec.weights, nn::constant(content),
                             nn::constant(speaker_rows(speaker, content.rows())));
  return out->value;
}

FeatureSequence convert(const DecoderParams& dec, const encoder::EncoderParams& enc, const FeatureSequence& source,
                        std::span<const float> target_speaker) {
  if (enc.config.input_dim != dec.config.feature_dim) {
    fail(ErrorKind::kValidation, "convert: encoder and decoder feature dimensions differ");
  }
  const auto y = encoder::encode(enc, source);
  return FeatureSequence(decode(dec, y.values(), target_speaker), Provenance::kConverted);
}

DecoderTrainResult train_decoder(const faps::Corpus& corpus, const encoder::EncoderParams& enc,
                                 const DecoderConfig& cfg, const DecoderTrainConfig& tc,
                                 const DecoderTrainOptions& options) {
  cfg.validate();
  tc.validate();
  if (cfg.feature_dim != corpus.feature_dim() || enc.config.input_dim != cfg.feature_dim) {
    fail(ErrorKind::kValidation, "train_decoder: feature dimensions of corpus, encoder and decoder differ");
  }
  if (cfg.speaker_dim != corpus.config.speaker_dim) {
    fail(ErrorKind::kValidation, "train_decoder: speaker dimension differs from the corpus");
  }
  const std::size_t train_groups = faps::holdout_begin(corpus.groups.size(), tc.holdout_fraction);

  struct Item {
    const faps::FapsMember* member;
    std::size_t encoded;
  };
  std::vector<Item> items;
  std::vector<const nn::Matrix*> raw;
  for (std::size_t g = 0; g < train_groups; ++g) {
    for (const auto& m : corpus.groups[g].members) {
      items.push_back({&m, raw.size()});
      raw.push_back(&m.features.values());
    }
  }
  const auto encoded = encode_all(enc, raw);

  DecoderTrainResult result{DecoderParams::initialize(cfg), {}, {}};
  nn::AdamOptions adam_opts;
  adam_opts.learning_rate = tc.learning_rate;
  result.state.adam = nn::AdamState<float>(result.params.weights.vars(), adam_opts);
  std::ofstream log_file;
  if (!options.log_path.empty()) {
    write_file(options.log_path, "");
    log_file.open(options.log_path, std::ios::app | std::ios::binary);
    if (!log_file) fail(ErrorKind::kIo, "train_decoder: cannot open log " + options.log_path.string());
  }
  const auto params = result.params.weights.vars();
  for (std::uint64_t step = 0; step < tc.steps; ++step) {
    Rng rng = Rng::derive(tc.seed, {kDecoderStream, step});
    std::vector<const nn::Matrix*> content, target;
    std::vector<nn::Matrix> spk;
    std::vector<const nn::Matrix*> spk_ptr;
    for (std::size_t i = 0; i < tc.batch_size; ++i) {
      const auto& it = items[rng.index(items.size())];
      content.push_back(&encoded[it.encoded]);
      target.push_back(&it.member->features.values());
      spk.push_back(speaker_rows(it.member->speaker.vector, encoded[it.encoded].rows()));
    }
    for (const auto& s : spk) spk_ptr.push_back(&s);
    auto out = decoder_forward(cfg, result.params.weights, nn::constant(nn::vstack<float>(content)),
                               nn::constant(nn::vstack<float>(spk_ptr)));
    auto loss = nn::l1_loss(out, nn::vstack<float>(target));
    const double value = loss->value[0];
    if (!std::isfinite(value)) {
      fail(ErrorKind::kNumeric, "train_decoder: non-finite loss at step " + std::to_string(step));
    }
    if (step % tc.log_interval == 0) {
      const encoder::TrainLogEntry entry{step, value, 0.0, value};
      result.log.push_back(entry);
      if (log_file) log_file << encoder::format_log_line(entry) << '\n' << std::flush;
      if (options.on_log) options.on_log(entry);
    }
    nn::backward(loss);
    nn::adam_step(params, result.state.adam);
    result.state.step = step + 1;
    if (!options.checkpoint_path.empty() && tc.checkpoint_interval > 0 &&
        result.state.step % tc.checkpoint_interval == 0 && result.state.step < tc.steps) {
      save_decoder_checkpoint({result.params, tc, result.state}, options.checkpoint_path);
    }
  }
  if (!options.checkpoint_path.empty()) {
    save_decoder_checkpoint({result.params, tc, result.state}, options.checkpoint_path);
  }
  return result;
}

ConversionReport conversion_oracle(const faps::Corpus& corpus, const encoder::EncoderParams& enc,
                                   const DecoderParams& dec, std::size_t pair_count, double holdout_fraction,
                                   std::uint64_t seed) {
  if (pair_count == 0) fail(ErrorKind::kValidation, "conversion_oracle: pair count must be >= 1");
  const std::size_t split = faps::holdout_begin(corpus.groups.size(), holdout_fraction);
  std::vector<const faps::FapsGroup*> held;
  for (std::size_t g = split; g < corpus.groups.size(); ++g) held.push_back(&corpus.groups[g]);
  Rng rng = Rng::derive(seed, {kDecoderStream, ~0ull});
  const auto pairs = sample_member_pairs(held, PairPool::kBase, pair_count, rng);

  std::vector<const nn::Matrix*> sources;
  for (const auto& [src, tgt] : pairs) sources.push_back(&held[src.group]->members[src.member].features.values());
  const auto encoded = encode_all(enc, sources);

  ConversionReport r;
  r.pair_count = pairs.size();
  std::vector<double> factors;
  std::size_t improved = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& src = held[pairs[i].first.group]->members[pairs[i].first.member];
    const auto& tgt = held[pairs[i].second.group]->members[pairs[i].second.member];
    const FeatureSequence converted(decode(dec, encoded[i], tgt.speaker.vector), Provenance::kConverted);
    const double before = pair_distance(src.features, tgt.features);
    const double after = pair_distance(converted, tgt.features);
    r.mean_l1_unconverted += before;
    r.mean_l1_converted += after;
    if (after < before) ++improved;
    factors.push_back(after > 0.0 ? before / after : std::numeric_limits<double>::infinity());
  }
  const double n = static_cast<double>(pairs.size());
  r.mean_l1_unconverted /= n;
  r.mean_l1_converted /= n;
  r.improved_fraction = static_cast<double>(improved) / n;
  std::sort(factors.begin(), factors.end());
  const std::size_t mid = factors.size() / 2;
  r.median_improvement_factor = factors.size() % 2 == 1 ? factors[mid] : 0.5 * (factors[mid - 1] + factors[mid]);
  return r;
}

std::string encode_decoder_checkpoint(const DecoderCheckpoint& ckpt) {
  nn::ParamFile file{checkpoint_config(ckpt.params.config, ckpt.training).dump(), ckpt.params.weights.clone(),
                     ckpt.state};
  return nn::encode_param_file(kMagic, file);
}

DecoderCheckpoint decode_decoder_checkpoint(std::string_view bytes, const std::string& context) {
  config::Json j;
  try {
    j = config::Json::parse(nn::peek_param_file_config(kMagic, bytes, context));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, context + ": config echo is not valid JSON: " + e.what());
  }
  DecoderCheckpoint ckpt;
  try {
    if (j.at("kind") != "avenet-decoder") fail(ErrorKind::kFormat, context + ": not a decoder checkpoint");
    ckpt.params.config = decoder_config_from_json(j.at("decoder"));
    ckpt.training = decoder_train_config_from_json(j.at("training"));
    ckpt.params.config.validate();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, context + ": " + e.what());
  } catch (const Error& e) {
    fail(ErrorKind::kFormat, context + ": " + e.what());
  }
  auto file = nn::decode_param_file(kMagic, bytes, context, make_decoder_weights(ckpt.params.config));
  ckpt.params.weights = std::move(file.weights);
  ckpt.state = std::move(file.state);
  return ckpt;
}

void save_decoder_checkpoint(const DecoderCheckpoint& ckpt, const std::filesystem::path& path) {
  write_file(path, encode_decoder_checkpoint(ckpt));
}

DecoderCheckpoint load_decoder_checkpoint(const std::filesystem::path& path) {
  return decode_decoder_checkpoint(read_file(path), path.string());
}

template nn::Var<float> decoder_forward(const DecoderConfig&, const nn::ParamSet<float>&, const nn::Var<float>&,
                                        const nn::Var<float>&);
template nn::Var<double> decoder_forward(const DecoderConfig&, const nn::ParamSet<double>&, const nn::Var<double>&,
                                         const nn::Var<double>&);

}  // namespace avenet::vc
