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
#include <cmath>
#include <set>
#include <tuple>

#include "report/feature_file.h"
#include "report/projection.h"
#include "report/run_report.h"
#include "test_util.h"

using namespace avenet;
using namespace avenet::report;
using avenet::testing::random_matrix;
using avenet::testing::scratch_dir;

namespace {

faps::CorpusConfig tiny_corpus() {
  faps::CorpusConfig c;
  c.groups = 20;
  c.base_speakers = 6;
  c.lws_members = 1;
  c.feature_dim = 5;
  c.content_dim = 2;
  c.speaker_dim = 2;
  c.phonemes = 4;
  c.script_length = {4, 6};
  c.phoneme_duration = {3, 4};
  c.frames = {12, 24};
  return c;
}

std::string le_u16(std::uint16_t v) { return {char(v & 0xff), char(v >> 8)}; }
std::string le_u32(std::uint32_t v) {
  return {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char(v >> 24)};
}

}  // namespace

TEST_SUITE("feature file") {

TEST_CASE("FPK1 byte layout matches a hand-built file") {
  const FeatureSequence s(nn::Matrix::from_rows({{1.0f, -2.5f}}), Provenance::kAverage);
  std::string want = "FPK1" + le_u16(1) + le_u32(1) + le_u32(2) + std::string(1, '\x02');
  const float payload[] = {1.0f, -2.5f};
  want.append(reinterpret_cast<const char*>(payload), sizeof payload);  // little-endian host
  CHECK(encode_feature_file(s) == want);
  CHECK(want.size() == kFeatureHeaderBytes + 8);
}

TEST_CASE("FPK1 round-trips every provenance and edge shape") {
  Rng rng(1);
  const std::pair<std::size_t, std::size_t> shapes[] = {{1, 1}, {1, 32}, {60, 1}, {7, 3}, {60, 1024}};
  for (auto [t, d] : shapes) {
    for (auto p : {Provenance::kRaw, Provenance::kAvenetOutput, Provenance::kAverage, Provenance::kConverted}) {
      const FeatureSequence s(random_matrix(t, d, rng, -1e3, 1e3), p);
      const auto bytes = encode_feature_file(s);
      CHECK(bytes.size() == kFeatureHeaderBytes + 4 * t * d);
      const auto back = decode_feature_file(bytes);
      CHECK(back.values() == s.values());
      CHECK(back.provenance() == p);
    }
  }
  const auto dir = scratch_dir("fpk1");
  const FeatureSequence s(random_matrix(60, 1024, rng), Provenance::kRaw);
  write_feature_file(dir / "x.fpk", s);
  CHECK(std::filesystem::file_size(dir / "x.fpk") == 15 + 60 * 1024 * 4);
  CHECK(read_feature_file(dir / "x.fpk").values() == s.values());
  CHECK_ERROR_KIND(read_feature_file(dir / "missing.fpk"), ErrorKind::kIo);
}

TEST_CASE("FPK1 rejects malformed input") {
  Rng rng(2);
  const auto good = encode_feature_file(FeatureSequence(random_matrix(3, 4, rng), Provenance::kRaw));
  for (std::size_t cut = 0; cut < good.size(); ++cut) {
    CHECK_ERROR_KIND(decode_feature_file(good.substr(0, cut)), ErrorKind::kFormat);
  }
  CHECK_ERROR_KIND(decode_feature_file(good + "x"), ErrorKind::kFormat);
  auto bad = good;
  bad[0] = 'X';
  CHECK_ERROR_KIND(decode_feature_file(bad), ErrorKind::kFormat);
  bad = good;
  bad[4] = 2;
  CHECK_ERROR_KIND(decode_feature_file(bad), ErrorKind::kFormat);
  bad = good;
  bad[14] = 9;
  CHECK_ERROR_KIND(decode_feature_file(bad), ErrorKind::kFormat);
  bad = good;
  const float nan = std::nanf("");
  bad.replace(kFeatureHeaderBytes, 4, reinterpret_cast<const char*>(&nan), 4);
  CHECK_ERROR_KIND(decode_feature_file(bad), ErrorKind::kFormat);
}

}  // TEST_SUITE

TEST_SUITE("projection") {

TEST_CASE("PCA recovers points lying on a plane exactly") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 3 + rng.index(6);
    // Two orthonormal directions via Gram-Schmidt on random vectors.
    std::vector<double> u(d), v(d), m(d);
    for (std::size_t k = 0; k < d; ++k) u[k] = rng.normal(), v[k] = rng.normal(), m[k] = rng.uniform(-5, 5);
    auto dot = [d](const std::vector<double>& a, const std::vector<double>& b) {
      double s = 0;
      for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
      return s;
    };
    const double nu = std::sqrt(dot(u, u));
    for (auto& x : u) x /= nu;
    const double uv = dot(u, v);
    for (std::size_t k = 0; k < d; ++k) v[k] -= uv * u[k];
    const double nv = std::sqrt(dot(v, v));
    for (auto& x : v) x /= nv;

    nn::Matrix pts(40, d);
    for (std::size_t i = 0; i < 40; ++i) {
      const double a = rng.uniform(-3, 3), b = rng.uniform(-1, 1);
      for (std::size_t k = 0; k < d; ++k) pts(i, k) = float(m[k] + a * u[k] + b * v[k]);
    }
    const auto pca = fit_pca_2d(pts);
    CHECK(pca.variance[0] >= pca.variance[1]);
    CHECK(std::abs(dot(pca.axes[0], pca.axes[1])) < 1e-9);
    for (int a = 0; a < 2; ++a) {
      CHECK(dot(pca.axes[a], pca.axes[a]) == doctest::Approx(1.0).epsilon(1e-9));
      std::size_t arg = 0;
      for (std::size_t k = 1; k < d; ++k)
        if (std::abs(pca.axes[a][k]) > std::abs(pca.axes[a][arg])) arg = k;
      CHECK(pca.axes[a][arg] > 0.0);
    }
    for (std::size_t i = 0; i < 40; ++i) {
      const auto xy = pca.project(pts.row(i));
      for (std::size_t k = 0; k < d; ++k) {
        const double rec = pca.mean[k] + xy[0] * pca.axes[0][k] + xy[1] * pca.axes[1][k];
        CHECK(std::abs(rec - pts(i, k)) < 1e-5);
      }
    }
  }
}

TEST_CASE("PCA input errors") {
  CHECK_ERROR_KIND(fit_pca_2d(nn::Matrix(1, 3)), ErrorKind::kValidation);
  nn::Matrix same(5, 3);
  for (auto& v : same.data()) v = 2.0f;
  CHECK_ERROR_KIND(fit_pca_2d(same), ErrorKind::kValidation);
  // Duplicated points are fine as long as there is some spread.
  auto dup = nn::Matrix::from_rows({{0, 0, 0}, {0, 0, 0}, {1, 2, 3}, {1, 2, 3}});
  const auto pca = fit_pca_2d(dup);
  CHECK(pca.variance[0] > 0.0);
  CHECK(std::abs(pca.variance[1]) < 1e-12);
  CHECK(pca.project(dup.row(0)) == pca.project(dup.row(1)));
  CHECK(pca.project(dup.row(2)) == pca.project(dup.row(3)));
  CHECK_ERROR_KIND(pca.project(std::vector<float>{1.0f, 2.0f}), ErrorKind::kValidation);
}

TEST_CASE("project_selection shape, CSV round-trip and identity encoder") {
  const auto corpus = faps::generate_corpus(tiny_corpus());
  encoder::EncoderConfig ec;
  ec.input_dim = 5;
  ec.model_dim = 4;
  const auto identity = encoder::EncoderParams::initialize(ec);
  ProjectionSelection sel;
  sel.speakers = 5;
  sel.frames = 10;
  const auto ex = project_selection(corpus, identity, sel);
  CHECK(ex.rows.size() == 3 * 5 * 10);
  std::set<std::tuple<std::string, std::string, std::uint32_t>> keys;
  for (const auto& r : ex.rows) keys.insert({r.speaker, r.representation, r.frame_index});
  CHECK(keys.size() == ex.rows.size());
  CHECK(ex.group_id >= faps::holdout_begin(corpus.groups.size(), 0.1));
  std::set<std::string> speakers;
  for (const auto& r : ex.rows) {
    CHECK(r.group_id == ex.group_id);
    CHECK(r.frame_index < 10);
    if (r.representation != "average") speakers.insert(r.speaker);
  }
  CHECK(speakers.size() == 5);
  // An untrained encoder is the identity, so both clouds coincide.
  CHECK(ex.mean_distance_origin == doctest::Approx(ex.mean_distance_avenet).epsilon(1e-6));

  const auto csv = projection_csv(ex.rows);
  CHECK(parse_projection_csv(csv) == ex.rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == std::ptrdiff_t(ex.rows.size() + 1));

  sel.frames = 100000;
  CHECK_ERROR_KIND(project_selection(corpus, identity, sel), ErrorKind::kValidation);
  sel.frames = 0;
  CHECK_ERROR_KIND(project_selection(corpus, identity, sel), ErrorKind::kConfig);
}

TEST_CASE("projection CSV parse errors carry line numbers") {
  const std::string header = "group_id,frame_index,speaker,representation,x,y\n";
  CHECK_ERROR_KIND(parse_projection_csv(""), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_projection_csv("a,b\n"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_projection_csv(header + "1,2,s,origin,0.5\n"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_projection_csv(header + "1,2,s,other,0.5,1\n"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_projection_csv(header + "1,x,s,origin,0.5,1\n"), ErrorKind::kParse);
  try {
    parse_projection_csv(header + "1,2,s,origin,0,1\n1,2,s,avenet,0,oops\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(parse_projection_csv(header).empty());
}

}  // TEST_SUITE

TEST_SUITE("run report") {

TEST_CASE("aggregate_report keeps only present sections") {
  ReportInputs in;
  in.command = "eval";
  in.config = {{"seed", 1}};
  CHECK_ERROR_KIND(aggregate_report(in), ErrorKind::kValidation);
  in.probe = ProbeSummary{};
  CHECK_ERROR_KIND(aggregate_report(in), ErrorKind::kValidation);

  DistanceReport d;
  d.pair_count = 3;
  d.mean_pair_distance_origin = 2.0;
  d.mean_pair_distance_avenet = 0.5;
  d.reduction_ratio = 4.0;
  in.distance = d;
  const auto j = aggregate_report(in);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["command"] == "eval");
  CHECK(j["config"]["seed"] == 1);
  CHECK(j["distance"]["reduction_ratio"] == 4.0);
  for (const char* absent : {"distance_unseen", "alignment", "probe", "conversion", "unseen_speakers", "projection"}) {
    CHECK_FALSE(j.contains(absent));
  }

  vc::ConversionReport c;
  c.pair_count = 2;
  c.improved_fraction = 1.0;
  in.conversion = c;
  const auto j2 = aggregate_report(in);
  CHECK(j2["conversion"]["pair_count"] == 2);
  CHECK(j2["conversion"]["improved_fraction"] == 1.0);

  in.schema_version = kReportSchemaVersion + 1;
  CHECK_ERROR_KIND(aggregate_report(in), ErrorKind::kValidation);
}

}  // TEST_SUITE
