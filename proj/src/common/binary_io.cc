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

#include "common/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "common/error.h"

namespace avenet {
namespace {

template <typename U>
void append_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
}

template <typename U>
U decode_le(const char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void ByteWriter::put_bytes(std::string_view bytes) { buffer_.append(bytes); }
void ByteWriter::put_u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }
void ByteWriter::put_u16(std::uint16_t v) { append_le(buffer_, v); }
void ByteWriter::put_u32(std::uint32_t v) { append_le(buffer_, v); }
void ByteWriter::put_u64(std::uint64_t v) { append_le(buffer_, v); }
void ByteWriter::put_f64(double v) { append_le(buffer_, std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_f32_array(std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    buffer_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
  } else {
    for (float f : values) append_le(buffer_, std::bit_cast<std::uint32_t>(f));
  }
}

void ByteWriter::put_string(std::string_view s) {
  put_u32(static_cast<std::uint32_t>(s.size()));
  buffer_.append(s);
}

std::string_view ByteReader::get_bytes(std::size_t n) {
  if (n > remaining()) {
    fail(ErrorKind::kFormat, context_ + ": truncated (needed " + std::to_string(n) +
                                 " bytes at offset " + std::to_string(pos_) + ", " +
                                 std::to_string(remaining()) + " left)");
  }
  std::string_view out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::get_u8() { return static_cast<std::uint8_t>(get_bytes(1)[0]); }
std::uint16_t ByteReader::get_u16() { return decode_le<std::uint16_t>(get_bytes(2).data()); }
std::uint32_t ByteReader::get_u32() { return decode_le<std::uint32_t>(get_bytes(4).data()); }
std::uint64_t ByteReader::get_u64() { return decode_le<std::uint64_t>(get_bytes(8).data()); }
double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

void ByteReader::get_f32_array(std::span<float> out) {
  std::string_view raw = get_bytes(out.size_bytes());
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), raw.data(), raw.size());
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = std::bit_cast<float>(decode_le<std::uint32_t>(raw.data() + 4 * i));
    }
  }
}

std::string ByteReader::get_string(std::size_t max_length) {
  std::uint32_t n = get_u32();
  if (n > max_length) {
    fail(ErrorKind::kFormat, context_ + ": string length " + std::to_string(n) + " exceeds limit");
  }
  return std::string(get_bytes(n));
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    fail(ErrorKind::kFormat,
         context_ + ": " + std::to_string(remaining()) + " unexpected trailing bytes");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::kIo, "failed reading '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      fail(ErrorKind::kIo, "cannot create directory '" + path.parent_path().string() +
                               "': " + ec.message());
    }
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::kIo, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

}  // namespace avenet
