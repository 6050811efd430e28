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

#ifndef AVENET_ALIGN_INTERVALS_H_
#define AVENET_ALIGN_INTERVALS_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace avenet::align {

// Boundaries are held as integer microseconds, which is exactly the
// resolution of the 6-decimal text format.
struct PhonemeInterval {
  std::string label;
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;

  double start() const { return static_cast<double>(start_us) * 1e-6; }
  double end() const { return static_cast<double>(end_us) * 1e-6; }
  friend bool operator==(const PhonemeInterval&, const PhonemeInterval&) = default;
};

class IntervalSequence {
 public:
  IntervalSequence() = default;
  // Throws kValidation when the ordering invariants do not hold.
  explicit IntervalSequence(std::vector<PhonemeInterval> intervals);

  const std::vector<PhonemeInterval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  const PhonemeInterval& operator[](std::size_t i) const { return intervals_[i]; }

  friend bool operator==(const IntervalSequence&, const IntervalSequence&) = default;

 private:
  std::vector<PhonemeInterval> intervals_;
};

// `label<TAB>start<TAB>end` lines with exactly six decimals. Blank lines and
// lines starting with '#' are skipped. Errors are kParse and name the line.
IntervalSequence parse_intervals(std::string_view text);
std::string serialize_intervals(const IntervalSequence& seq);
std::string format_seconds(std::int64_t microseconds);

using LabelSet = std::set<std::string, std::less<>>;

// Mean over phonemes of (|start_a - start_b| + |end_a - end_b|) / 2, in
// seconds. Phonemes whose label is in `skip` are left out. The two sequences
// must carry the same label sequence.
double pair_error(const IntervalSequence& a, const IntervalSequence& b, const LabelSet& skip = {});

struct IntervalPair {
  std::string id;
  IntervalSequence a;
  IntervalSequence b;
};

struct AlignmentReport {
  std::size_t pair_count = 0;
  std::vector<std::string> pair_ids;
  std::vector<double> per_pair_errors;
  double e_avg = 0.0;
  std::size_t worst_pair = 0;
};

AlignmentReport e_avg(std::span<const IntervalPair> pairs, const LabelSet& skip = {});

}  // namespace avenet::align

#endif  // AVENET_ALIGN_INTERVALS_H_
