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

#include "align/intervals.h"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "common/error.h"

namespace avenet::align {
namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::kParse, "intervals: line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return fields;
}

std::int64_t parse_time(std::string_view field, std::size_t line, const char* which) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (field.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    parse_error(line, std::string(which) + " time is not a number: '" + std::string(field) + "'");
  }
  if (v < 0.0) parse_error(line, std::string(which) + " time is negative");
  if (v > 9.0e12) parse_error(line, std::string(which) + " time is out of range");
  return std::llround(v * 1e6);
}

}  // namespace

std::string format_seconds(std::int64_t us) {
  const char* sign = us < 0 ? "-" : "";
  const std::uint64_t mag = us < 0 ? static_cast<std::uint64_t>(-us) : static_cast<std::uint64_t>(us);
  std::string frac = std::to_string(mag % 1000000);
  frac.insert(0, 6 - frac.size(), '0');
  return sign + std::to_string(mag / 1000000) + "." + frac;
}

IntervalSequence::IntervalSequence(std::vector<PhonemeInterval> intervals)
    : intervals_(std::move(intervals)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (iv.start_us < 0 || iv.end_us < iv.start_us) {
      fail(ErrorKind::kValidation, "interval " + std::to_string(i) + " has end before start");
    }
    if (i > 0 && iv.start_us < intervals_[i - 1].end_us) {
      fail(ErrorKind::kValidation, "interval " + std::to_string(i) + " overlaps its predecessor");
    }
  }
}

IntervalSequence parse_intervals(std::string_view text) {
  std::vector<PhonemeInterval> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      parse_error(line_no, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) parse_error(line_no, "empty label");
    PhonemeInterval iv{std::string(fields[0]), parse_time(fields[1], line_no, "start"),
                       parse_time(fields[2], line_no, "end")};
    if (iv.end_us < iv.start_us) parse_error(line_no, "end before start");
    if (!out.empty() && iv.start_us < out.back().end_us) {
      parse_error(line_no, "start precedes the previous interval's end");
    }
    if (fields[1] != format_seconds(iv.start_us) || fields[2] != format_seconds(iv.end_us)) {
      parse_error(line_no, "times must be written with exactly 6 decimal places");
    }
    out.push_back(std::move(iv));
  }
  return IntervalSequence(std::move(out));
}

std::string serialize_intervals(const IntervalSequence& seq) {
  std::string out;
  for (const auto& iv : seq.intervals()) {
    out += iv.label;
    out += '\t';
    out += format_seconds(iv.start_us);
    out += '\t';
    out += format_seconds(iv.end_us);
    out += '\n';
  }
  return out;
}

namespace {

// Pair error in microseconds.
double pair_error_us(const IntervalSequence& a, const IntervalSequence& b, const LabelSet& skip) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kValidation, "pair_error: sequences have " + std::to_string(a.size()) + " and " +
                                     std::to_string(b.size()) + " phonemes");
  }
  std::int64_t total_us = 0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].label != b[i].label) {
      fail(ErrorKind::kValidation, "pair_error: label mismatch at phoneme " + std::to_string(i) +
                                       " ('" + a[i].label + "' vs '" + b[i].label + "')");
    }
    if (skip.contains(a[i].label)) continue;
    total_us += std::llabs(a[i].start_us - b[i].start_us) + std::llabs(a[i].end_us - b[i].end_us);
    ++counted;
  }
  if (counted == 0) fail(ErrorKind::kValidation, "pair_error: no phonemes left to compare");
  return static_cast<double>(total_us) / (2.0 * static_cast<double>(counted));
}

}  // namespace

double pair_error(const IntervalSequence& a, const IntervalSequence& b, const LabelSet& skip) {
  return pair_error_us(a, b, skip) / 1e6;
}

AlignmentReport e_avg(std::span<const IntervalPair> pairs, const LabelSet& skip) {
  if (pairs.empty()) fail(ErrorKind::kValidation, "e_avg: no pairs");
  AlignmentReport report;
  report.pair_count = pairs.size();
  // Summed in microseconds so that whole-microsecond errors stay exact.
  double sum_us = 0.0;
  double worst_us = -1.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double e_us = pair_error_us(pairs[i].a, pairs[i].b, skip);
    report.pair_ids.push_back(pairs[i].id);
    report.per_pair_errors.push_back(e_us / 1e6);
    sum_us += e_us;
    if (e_us > worst_us) {
      worst_us = e_us;
      report.worst_pair = i;
    }
  }
  report.e_avg = sum_us / static_cast<double>(pairs.size()) / 1e6;
  return report;
}

}  // namespace avenet::align
