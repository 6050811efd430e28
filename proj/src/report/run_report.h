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

#ifndef AVENET_REPORT_RUN_REPORT_H_
#define AVENET_REPORT_RUN_REPORT_H_

#include <optional>
#include <string>

#include "align/intervals.h"
#include "avgfeat/stats.h"
#include "config/json_fields.h"
#include "report/projection.h"
#include "vc/decoder.h"
#include "vc/probe.h"

namespace avenet::report {

inline constexpr int kReportSchemaVersion = 1;

struct ProbeSummary {
  std::optional<vc::ProbeResult> raw;
  std::optional<vc::ProbeResult> avenet;
};

struct ReportInputs {
  int schema_version = kReportSchemaVersion;
  std::string command;
  config::Json config = config::Json::object();
  std::optional<DistanceReport> distance;         // held-out base pairs
  std::optional<DistanceReport> distance_unseen;  // held-out LWS pairs
  std::optional<align::AlignmentReport> alignment;
  std::optional<ProbeSummary> probe;
  std::optional<vc::ConversionReport> conversion;
  std::optional<vc::UnseenSpeakerReport> unseen_speakers;
  std::optional<ProjectionExport> projection;
};

// One JSON document; absent sections are omitted. A schema version other
// than kReportSchemaVersion, or no section at all, is rejected.
config::Json aggregate_report(const ReportInputs& inputs);

config::Json to_json(const DistanceReport& r);
config::Json to_json(const align::AlignmentReport& r);
config::Json to_json(const vc::ConversionReport& r);

}  // namespace avenet::report

#endif  // AVENET_REPORT_RUN_REPORT_H_
