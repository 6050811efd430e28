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

#include "vc/probe.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"
#include "numerics/adam.h"

namespace avenet::vc {
namespace {

constexpr std::uint64_t kProbeStream = 31;

struct FrameSet {
  nn::Matrix frames;  // N x D
  std::vector<int> labels;
};

std::vector<nn::Matrix> represent(std::span<const nn::Matrix* const> inputs, Representation rep,
                                  const encoder::EncoderParams* enc) {
  std::vector<nn::Matrix> out;
  out.reserve(inputs.size());
  if (rep == Representation::kRaw) {
    for (const auto* m : inputs) out.push_back(*m);
    return out;
  }
  if (enc == nullptr) fail(ErrorKind::kUsage, "probe: avenet representation needs an encoder");
  constexpr std::size_t kChunk = 64;
  for (std::size_t i = 0; i < inputs.size(); i += kChunk) {
    const auto n = std::min(kChunk, inputs.size() - i);
    for (auto& m : encoder::encode_batch(*enc, inputs.subspan(i, n))) out.push_back(std::move(m));
  }
  return out;
}

std::size_t speaker_index(const faps::Corpus& corpus, const std::string& id) {
  for (std::size_t i = 0; i < corpus.base_speakers.size(); ++i) {
    if (corpus.base_speakers[i].id == id) return i;
  }
  fail(ErrorKind::kValidation, "probe: unknown base speaker " + id);
}

// Frames of the selected members with a label per member.
FrameSet collect(const faps::Corpus& corpus, std::size_t begin, std::size_t end, faps::MemberRole role,
                 Representation rep, const encoder::EncoderParams* enc) {
  std::vector<const nn::Matrix*> inputs;
  std::vector<int> member_labels;
  for (std::size_t g = begin; g < end; ++g) {
    for (const auto& m : corpus.groups[g].members) {
      if (m.role != role) continue;
      inputs.push_back(&m.features.values());
      if (role == faps::MemberRole::kBase) {
        member_labels.push_back(static_cast<int>(speaker_index(corpus, m.speaker.id)));
      } else {
        const auto top = std::max_element(m.speaker.weights.begin(), m.speaker.weights.end()) - m.speaker.weights.begin();
        member_labels.push_back(static_cast<int>(m.speaker.sources.at(static_cast<std::size_t>(top))));
      }
    }
  }
  const auto reps = represent(inputs, rep, enc);
  std::size_t rows = 0;
  for (const auto& r : reps) rows += r.rows();
  FrameSet set{nn::Matrix(rows, corpus.feature_dim()), {}};
  set.labels.reserve(rows);
  std::size_t row = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    std::copy_n(reps[i].ptr(), reps[i].size(), set.frames.ptr() + row * set.frames.cols());
    row += reps[i].rows();
    set.labels.insert(set.labels.end(), reps[i].rows(), member_labels[i]);
  }
  return set;
}

SpeakerProbe fit(const FrameSet& train, std::size_t classes, const ProbeConfig& cfg) {
  const std::size_t d = train.frames.cols();
  const std::size_t n = train.frames.rows();
  if (n == 0) fail(ErrorKind::kValidation, "probe: no training frames");
  SpeakerProbe probe{nn::Matrix(1, d), nn::Matrix(1, d), {}, {}};
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0, q = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += train.frames(i, j);
    const double mean = s / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) q += (train.frames(i, j) - mean) * (train.frames(i, j) - mean);
    const double sd = std::sqrt(q / static_cast<double>(n));
    probe.mean[j] = static_cast<float>(mean);
    probe.scale[j] = static_cast<float>(sd > 1e-12 ? 1.0 / sd : 1.0);
  }
  nn::ParamSet<float> w;
  w.add("weight", nn::Matrix(d, classes));
  w.add("bias", nn::Matrix(1, classes));
  nn::AdamOptions opts;
  opts.learning_rate = cfg.learning_rate;
  nn::AdamState<float> adam(w.vars(), opts);
  const std::size_t batch = std::min(cfg.batch_size, n);
  nn::Matrix x(batch, d);
  std::vector<int> y(batch);
  for (std::uint64_t step = 0; step < cfg.steps; ++step) {
    Rng rng = Rng::derive(cfg.seed, {kProbeStream, step});
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t i = rng.index(n);
      for (std::size_t j = 0; j < d; ++j) x(b, j) = (train.frames(i, j) - probe.mean[j]) * probe.scale[j];
      y[b] = train.labels[i];
    }
    auto logits = nn::add(nn::matmul(nn::constant(x), w["weight"]), w["bias"]);
    auto loss = nn::cross_entropy(logits, std::span<const int>(y));
    if (cfg.weight_decay > 0.0) {
      loss = nn::add(loss, nn::scale(nn::sum(nn::mul(w["weight"], w["weight"])), 0.5 * cfg.weight_decay));
    }
    if (!std::isfinite(loss->value[0])) fail(ErrorKind::kNumeric, "probe: non-finite loss");
    nn::backward(loss);
    nn::adam_step(w.vars(), adam);
  }
  probe.weight = w["weight"]->value;
  probe.bias = w["bias"]->value;
  return probe;
}

double accuracy(const SpeakerProbe& probe, const FrameSet& test) {
  if (test.frames.rows() == 0) fail(ErrorKind::kValidation, "probe: no held-out frames");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < test.frames.rows(); ++i) {
    if (probe.predict(test.frames.row(i)) == static_cast<std::size_t>(test.labels[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test.frames.rows());
}

}  // namespace

void ProbeConfig::validate() const {
  if (steps == 0 || batch_size == 0) fail(ErrorKind::kConfig, "probe: steps and batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !(weight_decay >= 0.0)) {
    fail(ErrorKind::kConfig, "probe: learning_rate must be > 0 and weight_decay >= 0");
  }
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    fail(ErrorKind::kConfig, "probe: holdout_fraction must be in (0, 1)");
  }
}

config::Json to_json(const ProbeConfig& c) {
  config::Json j;
  j["steps"] = c.steps;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["weight_decay"] = c.weight_decay;
  j["holdout_fraction"] = c.holdout_fraction;
  j["seed"] = c.seed;
  return j;
}

ProbeConfig probe_config_from_json(const config::Json& j, const std::string& path) {
  ProbeConfig c;
  config::FieldReader rd(j, path);
  rd.get("steps", c.steps);
  rd.get("batch_size", c.batch_size);
  rd.get("learning_rate", c.learning_rate);
  rd.get("weight_decay", c.weight_decay);
  rd.get("holdout_fraction", c.holdout_fraction);
  rd.get("seed", c.seed);
  rd.finish();
  return c;
}

const char* to_string(Representation r) { return r == Representation::kRaw ? "raw" : "avenet"; }

std::size_t SpeakerProbe::predict(std::span<const float> frame) const {
  const std::size_t d = weight.rows(), k = weight.cols();
  std::size_t best = 0;
  double best_v = -1e300;
  for (std::size_t c = 0; c < k; ++c) {
    double v = bias[c];
    for (std::size_t j = 0; j < d; ++j) v += double((frame[j] - mean[j]) * scale[j]) * weight(j, c);
    if (v > best_v) {
      best_v = v;
      best = c;
    }
  }
  return best;
}

ProbeResult train_probe(const faps::Corpus& corpus, Representation rep, const encoder::EncoderParams* enc,
                        const ProbeConfig& cfg, bool shuffle_labels) {
  cfg.validate();
  const std::size_t classes = corpus.base_speakers.size();
  if (classes < 2) fail(ErrorKind::kValidation, "probe: need at least two speakers");
  const std::size_t split = faps::holdout_begin(corpus.groups.size(), cfg.holdout_fraction);
  FrameSet train = collect(corpus, 0, split, faps::MemberRole::kBase, rep, enc);
  const FrameSet test = collect(corpus, split, corpus.groups.size(), faps::MemberRole::kBase, rep, enc);
  if (shuffle_labels) {
    Rng rng = Rng::derive(cfg.seed, {kProbeStream, ~0ull});
    for (std::size_t i = train.labels.size(); i > 1; --i) std::swap(train.labels[i - 1], train.labels[rng.index(i)]);
  }
  ProbeResult r;
  r.probe = fit(train, classes, cfg);
  r.classes = classes;
  r.chance = 1.0 / static_cast<double>(classes);
  r.train_frames = train.frames.rows();
  r.test_frames = test.frames.rows();
  r.accuracy = accuracy(r.probe, test);
  return r;
}

UnseenSpeakerReport probe_unseen_speakers(const faps::Corpus& corpus, const encoder::EncoderCheckpoint* with_lws,
                                          const encoder::EncoderCheckpoint* without_lws, const ProbeConfig& cfg,
                                          std::size_t pair_count, std::uint64_t seed) {
  if (with_lws == nullptr || without_lws == nullptr) {
    fail(ErrorKind::kUsage, "probe_unseen_speakers: both encoder variants are required");
  }
  cfg.validate();
  const std::size_t split = faps::holdout_begin(corpus.groups.size(), cfg.holdout_fraction);
  std::vector<const faps::FapsGroup*> held;
  for (std::size_t g = split; g < corpus.groups.size(); ++g) held.push_back(&corpus.groups[g]);

  auto run = [&](const encoder::EncoderCheckpoint& ckpt, const char* name) {
    UnseenSpeakerVariant v;
    v.name = name;
    v.training = ckpt.training;
    Rng rng = Rng::derive(seed, {kProbeStream, 1});
    v.distance = distance_report(held, &ckpt.params, pair_count, PairPool::kLws, rng);
    const FrameSet train = collect(corpus, 0, split, faps::MemberRole::kBase, Representation::kAvenet, &ckpt.params);
    const FrameSet test = collect(corpus, split, corpus.groups.size(), faps::MemberRole::kLws,
                                  Representation::kAvenet, &ckpt.params);
    v.probe_accuracy = accuracy(fit(train, corpus.base_speakers.size(), cfg), test);
    return v;
  };
  return {run(*with_lws, "with-lws"), run(*without_lws, "without-lws")};
}

}  // namespace avenet::vc
