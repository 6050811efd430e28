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

#include "config/run_config.h"

#include "common/binary_io.h"
#include "common/error.h"

namespace avenet::config {
namespace {

Json eval_json(const EvalConfig& c) {
  Json j;
  j["holdout_fraction"] = c.holdout_fraction;
  j["pair_count"] = c.pair_count;
  j["align_pair_count"] = c.align_pair_count;
  j["conversion_pairs"] = c.conversion_pairs;
  j["projection_speakers"] = c.projection_speakers;
  j["projection_frames"] = c.projection_frames;
  j["seed"] = c.seed;
  return j;
}

EvalConfig eval_from_json(const Json& j) {
  EvalConfig c;
  FieldReader rd(j, "eval");
  rd.get("holdout_fraction", c.holdout_fraction);
  rd.get("pair_count", c.pair_count);
  rd.get("align_pair_count", c.align_pair_count);
  rd.get("conversion_pairs", c.conversion_pairs);
  rd.get("projection_speakers", c.projection_speakers);
  rd.get("projection_frames", c.projection_frames);
  rd.get("seed", c.seed);
  rd.finish();
  return c;
}

Json without_holdout(Json j) {
  j.erase("holdout_fraction");
  return j;
}

const Json& section_without_holdout(const Json& j, const char* name) {
  if (j.is_object() && j.contains("holdout_fraction")) {
    fail(ErrorKind::kConfig, std::string("config: ") + name + ".holdout_fraction is derived; set eval.holdout_fraction");
  }
  return j;
}

}  // namespace

void EvalConfig::validate() const {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    fail(ErrorKind::kConfig, "eval: holdout_fraction must be in (0, 1)");
  }
  if (pair_count == 0 || align_pair_count == 0 || conversion_pairs == 0) {
    fail(ErrorKind::kConfig, "eval: pair counts must be >= 1");
  }
  if (projection_speakers == 0 || projection_frames == 0) {
    fail(ErrorKind::kConfig, "eval: projection selection must be non-empty");
  }
}

void RunConfig::resolve() {
  eval.validate();
  training.holdout_fraction = eval.holdout_fraction;
  decoder_training.holdout_fraction = eval.holdout_fraction;
  probe.holdout_fraction = eval.holdout_fraction;
  corpus.validate();
  encoder.validate();
  training.validate();
  decoder.validate();
  decoder_training.validate();
  probe.validate();
}

report::ProjectionSelection RunConfig::projection_selection() const {
  return {eval.projection_speakers, eval.projection_frames, eval.holdout_fraction};
}

Json to_json(const RunConfig& c) {
  Json j;
  j["corpus"] = faps::to_json(c.corpus);
  j["encoder"] = encoder::to_json(c.encoder);
  j["training"] = without_holdout(encoder::to_json(c.training));
  j["decoder"] = vc::to_json(c.decoder);
  j["decoder_training"] = without_holdout(vc::to_json(c.decoder_training));
  j["probe"] = without_holdout(vc::to_json(c.probe));
  j["eval"] = eval_json(c.eval);
  j["paths"] = {{"corpus", c.paths.corpus}, {"encoder", c.paths.encoder}, {"decoder", c.paths.decoder},
                {"out", c.paths.out}};
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  FieldReader rd(j, "config");
  c.corpus = faps::corpus_config_from_json(rd.object("corpus"), "corpus");
  const Json& enc = rd.object("encoder");
  c.encoder = encoder::encoder_config_from_json(enc, "encoder");
  if (!enc.contains("input_dim")) c.encoder.input_dim = c.corpus.feature_dim;
  c.training = encoder::train_config_from_json(section_without_holdout(rd.object("training"), "training"), "training");
  const Json& dec = rd.object("decoder");
  c.decoder = vc::decoder_config_from_json(dec, "decoder");
  if (!dec.contains("feature_dim")) c.decoder.feature_dim = c.corpus.feature_dim;
  if (!dec.contains("speaker_dim")) c.decoder.speaker_dim = c.corpus.speaker_dim;
  c.decoder_training = vc::decoder_train_config_from_json(
      section_without_holdout(rd.object("decoder_training"), "decoder_training"), "decoder_training");
  c.probe = vc::probe_config_from_json(section_without_holdout(rd.object("probe"), "probe"), "probe");
  c.eval = eval_from_json(rd.object("eval"));
  FieldReader paths(rd.object("paths"), "paths");
  paths.get("corpus", c.paths.corpus);
  paths.get("encoder", c.paths.encoder);
  paths.get("decoder", c.paths.decoder);
  paths.get("out", c.paths.out);
  paths.finish();
  rd.finish();
  c.resolve();
  return c;
}

Json parse_json_text(std::string_view text, const std::string& context) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, context + ": invalid JSON: " + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(parse_json_text(read_file(path), path.string()));
}

void apply_override(Json& raw, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    fail(ErrorKind::kConfig, "override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;
  }
  if (!raw.is_object()) raw = Json::object();
  Json* node = &raw;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty()) fail(ErrorKind::kConfig, "override key '" + key + "' has an empty component");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      return;
    }
    Json& child = (*node)[part];
    if (child.is_null()) child = Json::object();
    if (!child.is_object()) fail(ErrorKind::kConfig, "override key '" + key + "' descends into a non-object");
    node = &child;
    pos = dot + 1;
  }
}

}  // namespace avenet::config
