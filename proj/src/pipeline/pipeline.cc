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

#include "pipeline/pipeline.h"

#include "common/binary_io.h"
#include "common/error.h"

namespace avenet::pipeline {
namespace {
constexpr std::uint64_t kEvalStream = 41;
constexpr std::uint64_t kAlignStream = 42;
}  // namespace

report::ReportInputs evaluate(const config::RunConfig& cfg, const faps::Corpus& corpus,
                              const encoder::EncoderParams& enc, const EvalOptions& options) {
  const std::size_t split = faps::holdout_begin(corpus.groups.size(), cfg.eval.holdout_fraction);
  std::vector<const faps::FapsGroup*> held;
  for (std::size_t g = split; g < corpus.groups.size(); ++g) held.push_back(&corpus.groups[g]);

  report::ReportInputs in;
  in.command = "eval";
  in.config = config::to_json(cfg);
  {
    Rng rng = Rng::derive(cfg.eval.seed, {kEvalStream, 0});
    in.distance = distance_report(held, &enc, cfg.eval.pair_count, PairPool::kBase, rng);
  }
  if (corpus.config.lws_members >= 2) {
    Rng rng = Rng::derive(cfg.eval.seed, {kEvalStream, 1});
    in.distance_unseen = distance_report(held, &enc, cfg.eval.pair_count, PairPool::kLws, rng);
  }
  if (options.probes) {
    report::ProbeSummary probe;
    probe.raw = vc::train_probe(corpus, vc::Representation::kRaw, nullptr, cfg.probe);
    probe.avenet = vc::train_probe(corpus, vc::Representation::kAvenet, &enc, cfg.probe);
    in.probe = std::move(probe);
  }
  return in;
}

align::AlignmentReport align_corpus(const config::RunConfig& cfg, const std::filesystem::path& dir,
                                    const faps::Corpus& corpus, const align::LabelSet& skip) {
  std::vector<const faps::FapsGroup*> groups;
  for (const auto& g : corpus.groups) groups.push_back(&g);
  Rng rng = Rng::derive(cfg.eval.seed, {kAlignStream});
  const auto pairs = sample_member_pairs(groups, PairPool::kAll, cfg.eval.align_pair_count, rng);
  std::vector<align::IntervalPair> loaded;
  loaded.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const auto& g = *groups[a.group];
    const auto& ma = g.members[a.member];
    const auto& mb = g.members[b.member];
    const auto pa = faps::member_interval_path(g, ma);
    const auto pb = faps::member_interval_path(g, mb);
    loaded.push_back({pa.generic_string() + "|" + pb.generic_string(),
                      align::parse_intervals(read_file(dir / pa)), align::parse_intervals(read_file(dir / pb))});
  }
  return align::e_avg(loaded, skip);
}

align::AlignmentReport align_files(const std::vector<std::filesystem::path>& a,
                                   const std::vector<std::filesystem::path>& b, const align::LabelSet& skip) {
  if (a.size() != b.size()) fail(ErrorKind::kUsage, "align: need the same number of files on both sides");
  std::vector<align::IntervalPair> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto parse = [](const std::filesystem::path& p) {
      try {
        return align::parse_intervals(read_file(p));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kParse) fail(ErrorKind::kParse, p.string() + ": " + e.what());
        throw;
      }
    };
    pairs.push_back({a[i].string() + "|" + b[i].string(), parse(a[i]), parse(b[i])});
  }
  return align::e_avg(pairs, skip);
}

align::LabelSet parse_label_list(std::string_view s) {
  align::LabelSet out;
  std::size_t pos = 0;
  while (pos <= s.size() && !s.empty()) {
    const auto c = s.find(',', pos);
    const auto item = s.substr(pos, c == std::string_view::npos ? c : c - pos);
    if (!item.empty()) out.emplace(item);
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

}  // namespace avenet::pipeline
