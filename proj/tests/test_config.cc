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
#include <fstream>

#include "config/run_config.h"
#include "test_util.h"

using namespace avenet;
using namespace avenet::config;
using avenet::testing::scratch_dir;

TEST_SUITE("config") {

TEST_CASE("empty object resolves to the documented defaults") {
  const auto c = run_config_from_json(Json::object());
  CHECK(c.corpus.groups == 2000);
  CHECK(c.corpus.feature_dim == 32);
  CHECK(c.encoder.input_dim == 32);
  CHECK(c.decoder.feature_dim == 32);
  CHECK(c.decoder.speaker_dim == 8);
  CHECK(c.training.comp_loss_enabled);
  CHECK(c.training.lws_in_training);
  CHECK(c.eval.holdout_fraction == 0.1);
}

TEST_CASE("JSON round-trip is a fixed point") {
  const auto c = run_config_from_json(Json::object());
  const auto j = to_json(c);
  const auto back = run_config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.training == c.training);
  CHECK(back.decoder == c.decoder);
  CHECK(back.eval == c.eval);
  CHECK(back.paths == c.paths);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_ERROR_KIND(run_config_from_json(Json{{"bogus", 1}}), ErrorKind::kConfig);
  CHECK_ERROR_KIND(run_config_from_json(Json{{"training", {{"stepz", 1}}}}), ErrorKind::kConfig);
  CHECK_ERROR_KIND(run_config_from_json(Json{{"paths", {{"corpse", "x"}}}}), ErrorKind::kConfig);
  CHECK_ERROR_KIND(run_config_from_json(Json{{"eval", 3}}), ErrorKind::kConfig);
  CHECK_ERROR_KIND(run_config_from_json(Json{{"training", {{"steps", "many"}}}}), ErrorKind::kConfig);
  try {
    run_config_from_json(Json{{"probe", {{"stepz", 1}}}});
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("probe.stepz") != std::string::npos);
  }
}

TEST_CASE("held-out fraction is set once and propagated") {
  const auto c = run_config_from_json(Json{{"eval", {{"holdout_fraction", 0.25}}}});
  CHECK(c.training.holdout_fraction == 0.25);
  CHECK(c.decoder_training.holdout_fraction == 0.25);
  CHECK(c.probe.holdout_fraction == 0.25);
  CHECK(c.projection_selection().holdout_fraction == 0.25);
  for (const char* section : {"training", "decoder_training", "probe"}) {
    CHECK_ERROR_KIND(run_config_from_json(Json{{section, {{"holdout_fraction", 0.2}}}}), ErrorKind::kConfig);
  }
  CHECK_ERROR_KIND(run_config_from_json(Json{{"eval", {{"holdout_fraction", 1.0}}}}), ErrorKind::kConfig);
  CHECK_ERROR_KIND(run_config_from_json(Json{{"eval", {{"holdout_fraction", 0.0}}}}), ErrorKind::kConfig);
}

TEST_CASE("dimensions follow the corpus unless set explicitly") {
  const auto c = run_config_from_json(Json{{"corpus", {{"feature_dim", 20}, {"speaker_dim", 4}}}});
  CHECK(c.encoder.input_dim == 20);
  CHECK(c.decoder.feature_dim == 20);
  CHECK(c.decoder.speaker_dim == 4);
  const auto d = run_config_from_json(Json{{"corpus", {{"feature_dim", 20}}}, {"encoder", {{"input_dim", 21}}}});
  CHECK(d.encoder.input_dim == 21);
}

TEST_CASE("overrides") {
  Json raw = Json::object();
  apply_override(raw, "training.steps=7");
  apply_override(raw, "training.comp_loss_enabled=false");
  apply_override(raw, "paths.out=run/x");
  apply_override(raw, "training.learning_rate=2e-4");
  apply_override(raw, "eval.holdout_fraction=0.2");
  const auto c = run_config_from_json(raw);
  CHECK(c.training.steps == 7);
  CHECK_FALSE(c.training.comp_loss_enabled);
  CHECK(c.paths.out == "run/x");
  CHECK(c.training.learning_rate == 2e-4);
  CHECK(c.probe.holdout_fraction == 0.2);

  // Later overrides win.
  apply_override(raw, "training.steps=9");
  CHECK(run_config_from_json(raw).training.steps == 9);
  // A value that parses as JSON keeps its JSON type.
  apply_override(raw, "paths.out=12");
  CHECK_ERROR_KIND(run_config_from_json(raw), ErrorKind::kConfig);
  apply_override(raw, "paths.out=\"12\"");
  CHECK(run_config_from_json(raw).paths.out == "12");

  CHECK_ERROR_KIND(apply_override(raw, "training.steps"), ErrorKind::kConfig);
  CHECK_ERROR_KIND(apply_override(raw, "=3"), ErrorKind::kConfig);
  CHECK_ERROR_KIND(apply_override(raw, "training..steps=3"), ErrorKind::kConfig);
  CHECK_ERROR_KIND(apply_override(raw, "training.steps.x=3"), ErrorKind::kConfig);
}

TEST_CASE("load_run_config error kinds") {
  const auto dir = scratch_dir("config");
  CHECK_ERROR_KIND(load_run_config(dir / "missing.json"), ErrorKind::kIo);
  std::ofstream(dir / "bad.json") << "{\"training\": ";
  CHECK_ERROR_KIND(load_run_config(dir / "bad.json"), ErrorKind::kParse);
  std::ofstream(dir / "ok.json") << "{\"training\": {\"steps\": 3}, \"eval\": {\"seed\": 4}}";
  const auto c = load_run_config(dir / "ok.json");
  CHECK(c.training.steps == 3);
  CHECK(c.eval.seed == 4);
  std::ofstream(dir / "invalid.json") << "{\"training\": {\"batch_size\": 0}}";
  CHECK_ERROR_KIND(load_run_config(dir / "invalid.json"), ErrorKind::kConfig);
}

}  // TEST_SUITE
