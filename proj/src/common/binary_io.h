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

#ifndef AVENET_COMMON_BINARY_IO_H_
#define AVENET_COMMON_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace avenet {

// Little-endian byte sink used by every binary format in the project.
class ByteWriter {
 public:
  void put_bytes(std::string_view bytes);
  void put_u8(std::uint8_t v);
  void put_u16(std::uint16_t v);
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f64(double v);
  void put_f32_array(std::span<const float> values);
  void put_string(std::string_view s);  // u32 length prefix

  const std::string& bytes() const { return buffer_; }

 private:
  std::string buffer_;
};

// Bounds-checked little-endian reader. Every overrun raises a kFormat error
// naming `context`, so truncated files never crash the caller.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string context)
      : data_(data), context_(std::move(context)) {}

  std::string_view get_bytes(std::size_t n);
  std::uint8_t get_u8();
  std::uint16_t get_u16();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  double get_f64();
  void get_f32_array(std::span<float> out);
  std::string get_string(std::size_t max_length = 1u << 24);

  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const;
  const std::string& context() const { return context_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::string read_file(const std::filesystem::path& path);
// Writes through a sibling temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace avenet

#endif  // AVENET_COMMON_BINARY_IO_H_
