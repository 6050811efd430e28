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

#ifndef AVENET_REPORT_FEATURE_FILE_H_
#define AVENET_REPORT_FEATURE_FILE_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "avgfeat/feature_sequence.h"

namespace avenet::report {

// FPK1: "FPK1", u16 version, u32 T, u32 D, u8 provenance, then T*D float32,
// all little-endian. Readers reject trailing bytes.
inline constexpr std::uint16_t kFeatureFileVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 15;

std::string encode_feature_file(const FeatureSequence& seq);
FeatureSequence decode_feature_file(std::string_view bytes, const std::string& context = "FPK1");

void write_feature_file(const std::filesystem::path& path, const FeatureSequence& seq);
FeatureSequence read_feature_file(const std::filesystem::path& path);

}  // namespace avenet::report

#endif  // AVENET_REPORT_FEATURE_FILE_H_
