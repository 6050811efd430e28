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

#ifndef AVENET_PIPELINE_PIPELINE_H_
#define AVENET_PIPELINE_PIPELINE_H_

#include <filesystem>
#include <vector>

#include "config/run_config.h"
#include "report/run_report.h"

namespace avenet::pipeline {

struct EvalOptions {
  bool probes = true;
};

// Held-out distance reports on base and LWS pairs, plus the raw and avenet
// speaker probes.
report::ReportInputs evaluate(const config::RunConfig& cfg, const faps::Corpus& corpus,
                              const encoder::EncoderParams& encoder, const EvalOptions& options = {});

// Scores `align_pair_count` within-group member pairs from the interval
// files of a corpus directory.
align::AlignmentReport align_corpus(const config::RunConfig& cfg, const std::filesystem::path& corpus_dir,
                                    const faps::Corpus& corpus, const align::LabelSet& skip);

align::AlignmentReport align_files(const std::vector<std::filesystem::path>& a,
                                   const std::vector<std::filesystem::path>& b, const align::LabelSet& skip);

align::LabelSet parse_label_list(std::string_view comma_separated);

}  // namespace avenet::pipeline

#endif  // AVENET_PIPELINE_PIPELINE_H_
