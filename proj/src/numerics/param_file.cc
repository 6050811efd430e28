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

#include "numerics/param_file.h"

#include "common/binary_io.h"
#include "common/error.h"

namespace avenet::nn {
namespace {

void read_header(ByteReader& r, std::string_view magic) {
  if (r.get_bytes(4) != magic) fail(ErrorKind::kFormat, r.context() + ": bad magic, expected " + std::string(magic));
  const auto version = r.get_u16();
  if (version != kParamFileVersion) {
    fail(ErrorKind::kFormat, r.context() + ": unsupported version " + std::to_string(version));
  }
}

}  // namespace

std::string encode_param_file(std::string_view magic, const ParamFile& file) {
  ByteWriter w;
  w.put_bytes(magic);
  w.put_u16(kParamFileVersion);
  w.put_string(file.config_json);
  w.put_u32(static_cast<std::uint32_t>(file.weights.size()));
  for (std::size_t i = 0; i < file.weights.size(); ++i) {
    const auto& v = file.weights.at(i)->value;
    w.put_string(file.weights.names()[i]);
    w.put_u32(static_cast<std::uint32_t>(v.rows()));
    w.put_u32(static_cast<std::uint32_t>(v.cols()));
    w.put_f32_array(v.data());
  }
  w.put_u8(file.state ? 1 : 0);
  if (file.state) {
    const auto& s = *file.state;
    if (s.adam.first_moment.size() != file.weights.size()) {
      fail(ErrorKind::kUsage, "param file: optimizer state does not match the weights");
    }
    w.put_u64(s.step);
    w.put_u64(s.adam.step);
    w.put_f64(s.adam.options.learning_rate);
    w.put_f64(s.adam.options.beta1);
    w.put_f64(s.adam.options.beta2);
    w.put_f64(s.adam.options.epsilon);
    for (std::size_t i = 0; i < file.weights.size(); ++i) {
      w.put_f32_array(s.adam.first_moment[i].data());
      w.put_f32_array(s.adam.second_moment[i].data());
    }
  }
  return w.bytes();
}

std::string peek_param_file_config(std::string_view magic, std::string_view bytes, const std::string& context) {
  ByteReader r(bytes, context);
  read_header(r, magic);
  return r.get_string();
}

ParamFile decode_param_file(std::string_view magic, std::string_view bytes, const std::string& context,
                            const ParamSet<float>& expected) {
  ByteReader r(bytes, context);
  read_header(r, magic);
  ParamFile file;
  file.config_json = r.get_string();
  const auto count = r.get_u32();
  if (count != expected.size()) {
    fail(ErrorKind::kFormat, context + ": " + std::to_string(count) + " tensors, expected " +
                                 std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto name = r.get_string(4096);
    const auto rows = r.get_u32();
    const auto cols = r.get_u32();
    const auto& want = expected.at(i)->value;
    if (name != expected.names()[i] || rows != want.rows() || cols != want.cols()) {
      fail(ErrorKind::kFormat, context + ": tensor " + std::to_string(i) + " is '" + name + "' " +
                                   std::to_string(rows) + "x" + std::to_string(cols) + ", expected '" +
                                   expected.names()[i] + "'");
    }
    Matrix m(rows, cols);
    r.get_f32_array(m.data());
    if (!m.all_finite()) fail(ErrorKind::kFormat, context + ": tensor '" + name + "' has non-finite values");
    file.weights.add(name, std::move(m));
  }
  const auto has_state = r.get_u8();
  if (has_state > 1) fail(ErrorKind::kFormat, context + ": bad state flag");
  if (has_state == 1) {
    TrainState s;
    s.step = r.get_u64();
    s.adam.step = r.get_u64();
    s.adam.options.learning_rate = r.get_f64();
    s.adam.options.beta1 = r.get_f64();
    s.adam.options.beta2 = r.get_f64();
    s.adam.options.epsilon = r.get_f64();
    for (std::size_t i = 0; i < count; ++i) {
      const auto& v = file.weights.at(i)->value;
      Matrix m(v.rows(), v.cols()), q(v.rows(), v.cols());
      r.get_f32_array(m.data());
      r.get_f32_array(q.data());
      s.adam.first_moment.push_back(std::move(m));
      s.adam.second_moment.push_back(std::move(q));
    }
    file.state = std::move(s);
  }
  r.expect_end();
  return file;
}

}  // namespace avenet::nn
