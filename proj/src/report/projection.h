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

#ifndef AVENET_REPORT_PROJECTION_H_
#define AVENET_REPORT_PROJECTION_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "encoder/model.h"
#include "faps/corpus.h"

namespace avenet::report {

// Two leading principal axes of a point cloud. Each axis is signed so that
// its largest-magnitude coordinate is positive.
struct Pca2d {
  std::vector<double> mean;                 // D
  std::array<std::vector<double>, 2> axes;  // 2 x D, orthonormal
  std::array<double, 2> variance{};

  std::array<double, 2> project(std::span<const float> point) const;
};

// Rows of `points` are the samples. Fewer than two points or zero total
// variance is a kValidation error.
Pca2d fit_pca_2d(const nn::Matrix& points);

struct ProjectionRow {
  std::uint32_t group_id = 0;
  std::uint32_t frame_index = 0;
  std::string speaker;
  std::string representation;  // origin | avenet | average
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const ProjectionRow&, const ProjectionRow&) = default;
};

struct ProjectionSelection {
  std::size_t speakers = 5;
  std::size_t frames = 30;
  double holdout_fraction = 0.1;
};

struct ProjectionExport {
  std::vector<ProjectionRow> rows;
  std::uint32_t group_id = 0;
  // Mean 2-D distance from each origin / avenet point to the average point
  // of the same frame.
  double mean_distance_origin = 0.0;
  double mean_distance_avenet = 0.0;
};

// Takes the first held-out group with at least `frames` frames, its first
// `speakers` base members and their first `frames` frames, and projects the
// origin, avenet and average points with one PCA fit on the pooled set.
ProjectionExport project_selection(const faps::Corpus& corpus, const encoder::EncoderParams& encoder,
                                   const ProjectionSelection& selection);

std::string projection_csv(const std::vector<ProjectionRow>& rows);
std::vector<ProjectionRow> parse_projection_csv(std::string_view text);

}  // namespace avenet::report

#endif  // AVENET_REPORT_PROJECTION_H_
