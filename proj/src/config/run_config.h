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

#ifndef AVENET_CONFIG_RUN_CONFIG_H_
#define AVENET_CONFIG_RUN_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "encoder/train.h"
#include "faps/corpus.h"
#include "report/projection.h"
#include "vc/decoder.h"
#include "vc/probe.h"

namespace avenet::config {

struct EvalConfig {
  double holdout_fraction = 0.1;
  std::size_t pair_count = 1000;
  std::size_t align_pair_count = 1000;
  std::size_t conversion_pairs = 500;
  std::size_t projection_speakers = 5;
  std::size_t projection_frames = 30;
  std::uint64_t seed = 17;

  void validate() const;
  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

struct PathsConfig {
  std::string corpus;
  std::string encoder;
  std::string decoder;
  std::string out;
  friend bool operator==(const PathsConfig&, const PathsConfig&) = default;
};

// Fully resolved configuration. The held-out fraction lives only in the
// eval section and is copied into the training, decoder and probe settings.
struct RunConfig {
  faps::CorpusConfig corpus;
  encoder::EncoderConfig encoder;
  encoder::TrainConfig training;
  vc::DecoderConfig decoder;
  vc::DecoderTrainConfig decoder_training;
  vc::ProbeConfig probe;
  EvalConfig eval;
  PathsConfig paths;

  void resolve();  // propagate shared values, then validate
  report::ProjectionSelection projection_selection() const;
};

Json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const Json& j);
// Parses JSON text. A missing file is kIo, malformed JSON kParse.
RunConfig load_run_config(const std::filesystem::path& path);
Json parse_json_text(std::string_view text, const std::string& context);

// Applies `section.key=value` to a raw config object before parsing. The
// value is read as a JSON literal when possible, else as a string.
void apply_override(Json& raw, std::string_view assignment);

}  // namespace avenet::config

#endif  // AVENET_CONFIG_RUN_CONFIG_H_
