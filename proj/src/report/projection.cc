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

#include "report/projection.h"

#include <Eigen/Eigenvalues>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "avgfeat/stats.h"
#include "common/error.h"

namespace avenet::report {

std::array<double, 2> Pca2d::project(std::span<const float> point) const {
  if (point.size() != mean.size()) fail(ErrorKind::kValidation, "projection: dimension mismatch");
  std::array<double, 2> out{0.0, 0.0};
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t j = 0; j < mean.size(); ++j) out[k] += (point[j] - mean[j]) * axes[k][j];
  }
  return out;
}

Pca2d fit_pca_2d(const nn::Matrix& points) {
  const std::size_t n = points.rows(), d = points.cols();
  if (n < 2 || d == 0) fail(ErrorKind::kValidation, "projection: need at least two points");
  Pca2d pca;
  pca.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) pca.mean[j] += points(i, j);
  }
  for (auto& m : pca.mean) m /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[static_cast<Eigen::Index>(j)] = points(i, j) - pca.mean[j];
    cov.noalias() += x * x.transpose();
  }
  cov /= static_cast<double>(n);
  if (!(cov.trace() > 0.0)) fail(ErrorKind::kValidation, "projection: input points have zero variance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(ErrorKind::kNumeric, "projection: eigen decomposition failed");
  for (std::size_t k = 0; k < 2; ++k) {
    // Eigenvalues come in increasing order.
    const Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - static_cast<Eigen::Index>(k);
    std::vector<double> axis(d, 0.0);
    double var = 0.0;
    if (col >= 0) {
      var = std::max(0.0, solver.eigenvalues()[col]);
      for (std::size_t j = 0; j < d; ++j) axis[j] = solver.eigenvectors()(static_cast<Eigen::Index>(j), col);
      std::size_t big = 0;
      for (std::size_t j = 1; j < d; ++j) {
        if (std::abs(axis[j]) > std::abs(axis[big])) big = j;
      }
      if (axis[big] < 0.0) {
        for (auto& a : axis) a = -a;
      }
    }
    pca.axes[k] = std::move(axis);
    pca.variance[k] = var;
  }
  return pca;
}

ProjectionExport project_selection(const faps::Corpus& corpus, const encoder::EncoderParams& encoder,
                                   const ProjectionSelection& sel) {
  if (sel.speakers == 0 || sel.frames == 0) fail(ErrorKind::kConfig, "projection: empty selection");
  const std::size_t begin = faps::holdout_begin(corpus.groups.size(), sel.holdout_fraction);
  const faps::FapsGroup* group = nullptr;
  for (std::size_t g = begin; g < corpus.groups.size() && group == nullptr; ++g) {
    if (corpus.groups[g].frames() >= sel.frames && corpus.groups[g].base_count() >= sel.speakers) {
      group = &corpus.groups[g];
    }
  }
  if (group == nullptr) fail(ErrorKind::kValidation, "projection: no held-out group fits the selection");

  std::vector<const faps::FapsMember*> members;
  std::vector<const nn::Matrix*> inputs;
  for (const auto& m : group->members) {
    if (m.role == faps::MemberRole::kBase && members.size() < sel.speakers) {
      members.push_back(&m);
      inputs.push_back(&m.features.values());
    }
  }
  const auto encoded = encoder::encode_batch(encoder, inputs);
  const auto average = average_feature(*group);
  const std::size_t d = corpus.feature_dim();

  // Pooled set, ordered member-major then frame, then origin/avenet/average.
  const char* kTags[3] = {"origin", "avenet", "average"};
  nn::Matrix pooled(members.size() * sel.frames * 3, d);
  std::size_t row = 0;
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t t = 0; t < sel.frames; ++t) {
      const std::span<const float> src[3] = {members[m]->features.values().row(t), encoded[m].row(t),
                                             average.values().row(t)};
      for (const auto& s : src) std::copy(s.begin(), s.end(), pooled.row(row++).begin());
    }
  }
  const Pca2d pca = fit_pca_2d(pooled);

  ProjectionExport out;
  out.group_id = group->id;
  double d_origin = 0.0, d_avenet = 0.0;
  row = 0;
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t t = 0; t < sel.frames; ++t) {
      std::array<double, 2> p[3];
      for (int k = 0; k < 3; ++k) {
        p[k] = pca.project(pooled.row(row++));
        out.rows.push_back({group->id, static_cast<std::uint32_t>(t), members[m]->speaker.id, kTags[k], p[k][0], p[k][1]});
      }
      d_origin += std::hypot(p[0][0] - p[2][0], p[0][1] - p[2][1]);
      d_avenet += std::hypot(p[1][0] - p[2][0], p[1][1] - p[2][1]);
    }
  }
  const double count = static_cast<double>(members.size() * sel.frames);
  out.mean_distance_origin = d_origin / count;
  out.mean_distance_avenet = d_avenet / count;
  return out;
}

std::string projection_csv(const std::vector<ProjectionRow>& rows) {
  std::string out = "group_id,frame_index,speaker,representation,x,y\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", r.x, r.y);
    out += std::to_string(r.group_id) + "," + std::to_string(r.frame_index) + "," + r.speaker + "," +
           r.representation + buf;
  }
  return out;
}

std::vector<ProjectionRow> parse_projection_csv(std::string_view text) {
  std::vector<ProjectionRow> rows;
  std::size_t pos = 0, line = 0;
  auto bad = [&line](const std::string& what) {
    fail(ErrorKind::kParse, "projection csv: line " + std::to_string(line) + ": " + what);
  };
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view l = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line;
    if (line == 1) {
      if (l != "group_id,frame_index,speaker,representation,x,y") bad("unexpected header");
      continue;
    }
    if (l.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t p = 0;
    while (true) {
      const auto c = l.find(',', p);
      f.push_back(l.substr(p, c == std::string_view::npos ? c : c - p));
      if (c == std::string_view::npos) break;
      p = c + 1;
    }
    if (f.size() != 6) bad("expected 6 fields");
    ProjectionRow r;
    auto num = [&](std::string_view s, auto& out) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
      if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) bad("bad number '" + std::string(s) + "'");
    };
    num(f[0], r.group_id);
    num(f[1], r.frame_index);
    r.speaker = std::string(f[2]);
    r.representation = std::string(f[3]);
    if (r.representation != "origin" && r.representation != "avenet" && r.representation != "average") {
      bad("unknown representation '" + r.representation + "'");
    }
    num(f[4], r.x);
    num(f[5], r.y);
    rows.push_back(std::move(r));
  }
  if (line == 0) fail(ErrorKind::kParse, "projection csv: empty input");
  return rows;
}

}  // namespace avenet::report
