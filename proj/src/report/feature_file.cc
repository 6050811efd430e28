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

#include "report/feature_file.h"

#include <limits>

#include "common/binary_io.h"
#include "common/error.h"

namespace avenet::report {

std::string encode_feature_file(const FeatureSequence& seq) {
  if (seq.frames() > std::numeric_limits<std::uint32_t>::max() ||
      seq.dim() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::kValidation, "FPK1: sequence too large");
  }
  ByteWriter w;
  w.put_bytes("FPK1");
  w.put_u16(kFeatureFileVersion);
  w.put_u32(static_cast<std::uint32_t>(seq.frames()));
  w.put_u32(static_cast<std::uint32_t>(seq.dim()));
  w.put_u8(static_cast<std::uint8_t>(seq.provenance()));
  w.put_f32_array(seq.values().data());
  return w.bytes();
}

FeatureSequence decode_feature_file(std::string_view bytes, const std::string& context) {
  ByteReader r(bytes, context);
  if (r.get_bytes(4) != "FPK1") fail(ErrorKind::kFormat, context + ": bad magic");
  const auto version = r.get_u16();
  if (version != kFeatureFileVersion) {
    fail(ErrorKind::kFormat, context + ": unsupported version " + std::to_string(version));
  }
  const std::uint64_t t = r.get_u32();
  const std::uint64_t d = r.get_u32();
  Provenance prov;
  if (!provenance_from_u8(r.get_u8(), prov)) fail(ErrorKind::kFormat, context + ": unknown provenance tag");
  const bool too_big = d != 0 && t > r.remaining() / 4 / d;
  if (too_big || t * d * 4 != r.remaining()) {
    fail(ErrorKind::kFormat, context + ": payload is " + std::to_string(r.remaining()) +
                                 " bytes, header declares " + std::to_string(t) + "x" + std::to_string(d) +
                                 " frames");
  }
  nn::Matrix values(t, d);
  r.get_f32_array(values.data());
  r.expect_end();
  if (!values.all_finite()) fail(ErrorKind::kFormat, context + ": payload contains non-finite values");
  return FeatureSequence(std::move(values), prov);
}

void write_feature_file(const std::filesystem::path& path, const FeatureSequence& seq) {
  write_file(path, encode_feature_file(seq));
}

FeatureSequence read_feature_file(const std::filesystem::path& path) {
  return decode_feature_file(read_file(path), path.string());
}

}  // namespace avenet::report
