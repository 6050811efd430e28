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

#ifndef AVENET_NUMERICS_PARAM_FILE_H_
#define AVENET_NUMERICS_PARAM_FILE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "numerics/adam.h"
#include "numerics/params.h"

namespace avenet::nn {

// Optimizer position stored alongside the weights so a run can resume.
struct TrainState {
  std::uint64_t step = 0;
  AdamState<float> adam;
};

// Shared layout of the AVN1 and VCL1 checkpoints, little-endian:
//   magic[4] u16 version  string config_json
//   u32 tensor_count  { string name  u32 rows  u32 cols  f32 data[rows*cols] }
//   u8 has_state  [ u64 step  u64 adam_step  f64 lr  f64 beta1  f64 beta2  f64 eps
//                   { f32 m[...]  f32 v[...] } per tensor ]
// Strings carry a u32 length prefix.
inline constexpr std::uint16_t kParamFileVersion = 1;

struct ParamFile {
  std::string config_json;
  ParamSet<float> weights;
  std::optional<TrainState> state;
};

std::string encode_param_file(std::string_view magic, const ParamFile& file);
// `expected` supplies tensor names and shapes; any difference is a kFormat
// error. Values are replaced by the file's.
ParamFile decode_param_file(std::string_view magic, std::string_view bytes, const std::string& context,
                            const ParamSet<float>& expected);
// Reads only the config echo, so callers can build the expected layout.
std::string peek_param_file_config(std::string_view magic, std::string_view bytes, const std::string& context);

}  // namespace avenet::nn

#endif  // AVENET_NUMERICS_PARAM_FILE_H_
