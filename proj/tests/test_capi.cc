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
#include <avenet/avenet.h>
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("avenet_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string take(avenet_text* t) {
  std::string s(avenet_text_data(t), avenet_text_size(t));
  avenet_text_free(t);
  return s;
}

const char* const kSmall[] = {
    "corpus.groups=30",       "corpus.base_speakers=4", "corpus.lws_members=2",   "corpus.feature_dim=6",
    "corpus.content_dim=2",   "corpus.speaker_dim=2",   "encoder.model_dim=8",    "training.steps=20",
    "training.batch_size=4",  "training.log_interval=5", "decoder.hidden_dim=8",  "decoder_training.steps=20",
    "decoder_training.batch_size=4", "probe.steps=50",  "eval.pair_count=20",     "eval.align_pair_count=20",
    "eval.conversion_pairs=10", "eval.projection_frames=5", "eval.projection_speakers=3"};
constexpr size_t kSmallCount = sizeof kSmall / sizeof kSmall[0];

avenet_config* small_config() {
  avenet_config* cfg = nullptr;
  REQUIRE(avenet_config_from_json("{}", kSmall, kSmallCount, &cfg) == AVENET_OK);
  return cfg;
}

}  // namespace

TEST_SUITE("c api") {

TEST_CASE("status names, exit codes, version") {
  CHECK(std::string(avenet_version()) == "0.1.0");
  CHECK(avenet_exit_code(AVENET_OK) == 0);
  CHECK(avenet_exit_code(AVENET_ERR_CONFIG) == 1);
  CHECK(avenet_exit_code(AVENET_ERR_VALIDATION) == 1);
  CHECK(avenet_exit_code(AVENET_ERR_PARSE) == 1);
  CHECK(avenet_exit_code(AVENET_ERR_USAGE) == 1);
  CHECK(avenet_exit_code(AVENET_ERR_IO) == 2);
  CHECK(avenet_exit_code(AVENET_ERR_NUMERIC) == 3);
  CHECK(std::string(avenet_status_name(AVENET_ERR_IO)) != std::string(avenet_status_name(AVENET_OK)));
}

TEST_CASE("null arguments are usage errors with a message") {
  avenet_config* cfg = nullptr;
  CHECK(avenet_config_default(nullptr) == AVENET_ERR_USAGE);
  CHECK(std::strlen(avenet_last_error()) > 0);
  CHECK(avenet_config_load(nullptr, nullptr, 0, &cfg) == AVENET_ERR_USAGE);
  CHECK(avenet_corpus_generate(nullptr, 1, nullptr) == AVENET_ERR_USAGE);
  double d = 0;
  CHECK(avenet_features_distance(nullptr, nullptr, &d) == AVENET_ERR_USAGE);
  // Free functions accept NULL.
  avenet_config_free(nullptr);
  avenet_corpus_free(nullptr);
  avenet_encoder_free(nullptr);
  avenet_decoder_free(nullptr);
  avenet_features_free(nullptr);
  avenet_text_free(nullptr);
}

TEST_CASE("config: defaults, overrides, errors") {
  avenet_config* cfg = nullptr;
  REQUIRE(avenet_config_default(&cfg) == AVENET_OK);
  avenet_text* t = nullptr;
  REQUIRE(avenet_config_to_json(cfg, &t) == AVENET_OK);
  const auto j = nlohmann::json::parse(take(t));
  CHECK(j["training"]["steps"] == 20000);
  CHECK(j["training"]["lr_schedule"] == "cosine");
  avenet_config_free(cfg);

  const char* over[] = {"training.steps=12"};
  REQUIRE(avenet_config_from_json("{\"eval\": {\"seed\": 3}}", over, 1, &cfg) == AVENET_OK);
  REQUIRE(avenet_config_to_json(cfg, &t) == AVENET_OK);
  const auto k = nlohmann::json::parse(take(t));
  CHECK(k["training"]["steps"] == 12);
  CHECK(k["eval"]["seed"] == 3);
  avenet_config_free(cfg);

  cfg = nullptr;
  CHECK(avenet_config_from_json("{\"nope\": 1}", nullptr, 0, &cfg) == AVENET_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(avenet_last_error()).find("nope") != std::string::npos);
  CHECK(avenet_config_from_json("{", nullptr, 0, &cfg) == AVENET_ERR_PARSE);
  const char* bad[] = {"training.steps"};
  CHECK(avenet_config_from_json("{}", bad, 1, &cfg) == AVENET_ERR_CONFIG);
  CHECK(avenet_config_load("/nonexistent/avenet.json", nullptr, 0, &cfg) == AVENET_ERR_IO);
}

TEST_CASE("features: create, accessors, file round-trip, distance") {
  const float a[] = {1, 2, 3, 4, 5, 6};
  const float b[] = {1, 2, 3, 4, 5, 9};
  avenet_features *fa = nullptr, *fb = nullptr, *back = nullptr;
  REQUIRE(avenet_features_create(a, 2, 3, AVENET_PROVENANCE_AVERAGE, &fa) == AVENET_OK);
  REQUIRE(avenet_features_create(b, 2, 3, AVENET_PROVENANCE_RAW, &fb) == AVENET_OK);
  CHECK(avenet_features_frames(fa) == 2);
  CHECK(avenet_features_dim(fa) == 3);
  CHECK(avenet_features_provenance(fa) == AVENET_PROVENANCE_AVERAGE);
  CHECK(std::memcmp(avenet_features_data(fa), a, sizeof a) == 0);
  double d = 0;
  REQUIRE(avenet_features_distance(fa, fb, &d) == AVENET_OK);
  CHECK(d == doctest::Approx(0.5));

  const auto dir = scratch("features");
  const auto path = (dir / "a.fpk").string();
  REQUIRE(avenet_features_write(fa, path.c_str()) == AVENET_OK);
  REQUIRE(avenet_features_read(path.c_str(), &back) == AVENET_OK);
  CHECK(std::memcmp(avenet_features_data(back), a, sizeof a) == 0);
  CHECK(avenet_features_provenance(back) == AVENET_PROVENANCE_AVERAGE);
  avenet_features* none = nullptr;
  CHECK(avenet_features_read((dir / "missing.fpk").string().c_str(), &none) == AVENET_ERR_IO);
  const float nan[] = {NAN};
  CHECK(avenet_features_create(nan, 1, 1, AVENET_PROVENANCE_RAW, &none) != AVENET_OK);
  avenet_features* other = nullptr;
  REQUIRE(avenet_features_create(a, 3, 2, AVENET_PROVENANCE_RAW, &other) == AVENET_OK);
  CHECK(avenet_features_distance(fa, other, &d) == AVENET_ERR_VALIDATION);
  for (auto* f : {fa, fb, back, other}) avenet_features_free(f);
}

TEST_CASE("end-to-end pipeline through the C API") {
  avenet_config* cfg = small_config();
  avenet_corpus* corpus = nullptr;
  REQUIRE(avenet_corpus_generate(cfg, 2, &corpus) == AVENET_OK);
  CHECK(avenet_corpus_group_count(corpus) == 30);
  CHECK(avenet_corpus_feature_dim(corpus) == 6);

  float spk[8];
  size_t dim = 0;
  CHECK(avenet_corpus_speaker(corpus, "no-such-speaker", spk, 8, &dim) == AVENET_ERR_VALIDATION);

  const auto dir = scratch("pipeline");
  const auto cdir = (dir / "corpus").string();
  REQUIRE(avenet_corpus_write(corpus, cdir.c_str(), 1) == AVENET_OK);
  avenet_corpus* loaded = nullptr;
  REQUIRE(avenet_corpus_load(cdir.c_str(), 1, &loaded) == AVENET_OK);
  CHECK(avenet_corpus_group_count(loaded) == 30);

  std::vector<uint64_t> steps;
  avenet_train_options opts{};
  const auto ckpt = (dir / "enc.avn").string();
  const auto log = (dir / "train.log").string();
  opts.checkpoint_path = ckpt.c_str();
  opts.log_path = log.c_str();
  opts.user = &steps;
  opts.on_log = [](uint64_t step, double, double, double, void* user) {
    static_cast<std::vector<uint64_t>*>(user)->push_back(step);
  };
  avenet_encoder* enc = nullptr;
  REQUIRE(avenet_encoder_train(cfg, loaded, &opts, &enc) == AVENET_OK);
  CHECK(steps == std::vector<uint64_t>{0, 5, 10, 15});
  CHECK(fs::file_size(log) > 0);

  avenet_encoder* reloaded = nullptr;
  REQUIRE(avenet_encoder_load(ckpt.c_str(), &reloaded) == AVENET_OK);
  avenet_text* t = nullptr;
  REQUIRE(avenet_encoder_config_json(reloaded, &t) == AVENET_OK);
  const auto echo = nlohmann::json::parse(take(t));
  CHECK(echo["training"]["steps"] == 20);
  CHECK(echo["trained_steps"] == 20);

  // Encoding a member with the reloaded encoder matches the trained one.
  const float frame[6] = {0.1f, -0.2f, 0.3f, 0.0f, 1.0f, -1.0f};
  avenet_features *in = nullptr, *o1 = nullptr, *o2 = nullptr;
  REQUIRE(avenet_features_create(frame, 1, 6, AVENET_PROVENANCE_RAW, &in) == AVENET_OK);
  REQUIRE(avenet_encoder_encode(enc, in, &o1) == AVENET_OK);
  REQUIRE(avenet_encoder_encode(reloaded, in, &o2) == AVENET_OK);
  CHECK(std::memcmp(avenet_features_data(o1), avenet_features_data(o2), 6 * sizeof(float)) == 0);
  CHECK(avenet_features_provenance(o1) == AVENET_PROVENANCE_AVENET);

  avenet_text* report = nullptr;
  REQUIRE(avenet_evaluate(cfg, loaded, enc, 1, &report) == AVENET_OK);
  const auto rep = nlohmann::json::parse(take(report));
  CHECK(rep["command"] == "eval");
  CHECK(rep.contains("distance"));
  CHECK(rep["probe"].contains("raw"));
  CHECK(rep["probe"].contains("avenet"));

  avenet_decoder* dec = nullptr;
  REQUIRE(avenet_decoder_train(cfg, loaded, enc, nullptr, &dec) == AVENET_OK);
  const auto dpath = (dir / "dec.vcl").string();
  REQUIRE(avenet_decoder_save(dec, dpath.c_str()) == AVENET_OK);
  avenet_decoder* dec2 = nullptr;
  REQUIRE(avenet_decoder_load(dpath.c_str(), &dec2) == AVENET_OK);
  avenet_train_options resume{};
  resume.resume = 1;
  avenet_decoder* dec3 = nullptr;
  CHECK(avenet_decoder_train(cfg, loaded, enc, &resume, &dec3) == AVENET_ERR_USAGE);

  avenet_features* conv = nullptr;
  const float target[2] = {0.5f, -0.5f};
  REQUIRE(avenet_convert(dec2, enc, in, target, 2, &conv) == AVENET_OK);
  CHECK(avenet_features_frames(conv) == 1);
  CHECK(avenet_features_provenance(conv) == AVENET_PROVENANCE_CONVERTED);
  avenet_features* bad = nullptr;
  CHECK(avenet_convert(dec2, enc, in, target, 1, &bad) == AVENET_ERR_VALIDATION);

  REQUIRE(avenet_conversion_report(cfg, loaded, enc, dec2, &report) == AVENET_OK);
  CHECK(nlohmann::json::parse(take(report))["conversion"]["pair_count"] == 10);

  REQUIRE(avenet_unseen_speaker_report(cfg, loaded, enc, enc, &report) == AVENET_OK);
  const auto unseen = nlohmann::json::parse(take(report))["unseen_speakers"];
  CHECK(unseen["with_lws"]["probe_accuracy"] == unseen["without_lws"]["probe_accuracy"]);
  CHECK(avenet_unseen_speaker_report(cfg, loaded, enc, nullptr, &report) == AVENET_ERR_USAGE);

  avenet_text *csv = nullptr, *prep = nullptr;
  REQUIRE(avenet_project(cfg, loaded, enc, &csv, &prep) == AVENET_OK);
  const auto csv_text = take(csv);
  CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 1 + 3 * 3 * 5);
  CHECK(nlohmann::json::parse(take(prep)).contains("projection"));

  REQUIRE(avenet_align_corpus(cfg, cdir.c_str(), nullptr, &report) == AVENET_OK);
  CHECK(nlohmann::json::parse(take(report))["alignment"]["e_avg"] == 0.0);

  for (auto* f : {in, o1, o2, conv}) avenet_features_free(f);
  avenet_decoder_free(dec);
  avenet_decoder_free(dec2);
  avenet_encoder_free(enc);
  avenet_encoder_free(reloaded);
  avenet_corpus_free(corpus);
  avenet_corpus_free(loaded);
  avenet_config_free(cfg);
}

TEST_CASE("non-finite training is a numeric error") {
  const char* over[] = {"training.learning_rate=1e30"};
  avenet_config* base = small_config();
  avenet_text* t = nullptr;
  REQUIRE(avenet_config_to_json(base, &t) == AVENET_OK);
  const auto json = take(t);
  avenet_config* cfg = nullptr;
  REQUIRE(avenet_config_from_json(json.c_str(), over, 1, &cfg) == AVENET_OK);
  avenet_corpus* corpus = nullptr;
  REQUIRE(avenet_corpus_generate(cfg, 1, &corpus) == AVENET_OK);
  avenet_encoder* enc = nullptr;
  CHECK(avenet_encoder_train(cfg, corpus, nullptr, &enc) == AVENET_ERR_NUMERIC);
  CHECK(enc == nullptr);
  CHECK(avenet_exit_code(AVENET_ERR_NUMERIC) == 3);
  avenet_corpus_free(corpus);
  avenet_config_free(cfg);
  avenet_config_free(base);
}

}  // TEST_SUITE
