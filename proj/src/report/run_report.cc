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

#include "report/run_report.h"

#include "common/error.h"

namespace avenet::report {
namespace {

config::Json probe_json(const vc::ProbeResult& p) {
  config::Json j;
  j["accuracy"] = p.accuracy;
  j["chance"] = p.chance;
  j["classes"] = p.classes;
  j["train_frames"] = p.train_frames;
  j["test_frames"] = p.test_frames;
  return j;
}

config::Json variant_json(const vc::UnseenSpeakerVariant& v) {
  config::Json j;
  j["name"] = v.name;
  j["training"] = encoder::to_json(v.training);
  j["distance"] = to_json(v.distance);
  j["probe_accuracy"] = v.probe_accuracy;
  return j;
}

}  // namespace

config::Json to_json(const DistanceReport& r) {
  config::Json j;
  j["pair_count"] = r.pair_count;
  j["mav"] = r.mav;
  j["mav_avenet"] = r.mav_avenet;
  j["mean_pair_distance_origin"] = r.mean_pair_distance_origin;
  j["mean_pair_distance_avenet"] = r.mean_pair_distance_avenet;
  j["reduction_ratio"] = r.reduction_ratio;
  return j;
}

config::Json to_json(const align::AlignmentReport& r) {
  config::Json j;
  j["pair_count"] = r.pair_count;
  j["e_avg"] = r.e_avg;
  j["worst_pair"] = r.pair_ids.empty() ? std::string() : r.pair_ids[r.worst_pair];
  config::Json pairs = config::Json::array();
  for (std::size_t i = 0; i < r.per_pair_errors.size(); ++i) {
    pairs.push_back({{"id", r.pair_ids[i]}, {"error", r.per_pair_errors[i]}});
  }
  j["pairs"] = std::move(pairs);
  return j;
}

config::Json to_json(const vc::ConversionReport& r) {
  config::Json j;
  j["pair_count"] = r.pair_count;
  j["improved_fraction"] = r.improved_fraction;
  j["median_improvement_factor"] = r.median_improvement_factor;
  j["mean_l1_unconverted"] = r.mean_l1_unconverted;
  j["mean_l1_converted"] = r.mean_l1_converted;
  return j;
}

config::Json aggregate_report(const ReportInputs& in) {
  if (in.schema_version != kReportSchemaVersion) {
    fail(ErrorKind::kValidation, "report: schema version " + std::to_string(in.schema_version) +
                                     " conflicts with " + std::to_string(kReportSchemaVersion));
  }
  config::Json j;
  j["schema"] = "avenet-run-report";
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = in.command;
  j["config"] = in.config;
  bool any = false;
  if (in.distance) {
    j["distance"] = to_json(*in.distance);
    any = true;
  }
  if (in.distance_unseen) {
    j["distance_unseen"] = to_json(*in.distance_unseen);
    any = true;
  }
  if (in.alignment) {
    j["alignment"] = to_json(*in.alignment);
    any = true;
  }
  if (in.probe && (in.probe->raw || in.probe->avenet)) {
    config::Json p;
    if (in.probe->raw) p["raw"] = probe_json(*in.probe->raw);
    if (in.probe->avenet) p["avenet"] = probe_json(*in.probe->avenet);
    j["probe"] = std::move(p);
    any = true;
  }
  if (in.conversion) {
    j["conversion"] = to_json(*in.conversion);
    any = true;
  }
  if (in.unseen_speakers) {
    j["unseen_speakers"] = {{"with_lws", variant_json(in.unseen_speakers->with_lws)},
                            {"without_lws", variant_json(in.unseen_speakers->without_lws)}};
    any = true;
  }
  if (in.projection) {
    j["projection"] = {{"group_id", in.projection->group_id},
                       {"rows", in.projection->rows.size()},
                       {"mean_distance_origin", in.projection->mean_distance_origin},
                       {"mean_distance_avenet", in.projection->mean_distance_avenet}};
    any = true;
  }
  if (!any) fail(ErrorKind::kValidation, "report: no sections to report");
  return j;
}

}  // namespace avenet::report
