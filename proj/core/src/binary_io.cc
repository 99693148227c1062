// Copyright 2026 The ProsodyBench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include "prosodybench/error.h"

namespace prosodybench::internal {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void Put(std::vector<std::uint8_t>& buf, T v) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.insert(buf.end(), raw, raw + sizeof(T));
}

}  // namespace

void ByteWriter::Magic(std::string_view magic) { Bytes(magic); }
void ByteWriter::U16(std::uint16_t v) { Put(buf_, v); }
void ByteWriter::U32(std::uint32_t v) { Put(buf_, v); }
void ByteWriter::U64(std::uint64_t v) { Put(buf_, v); }
void ByteWriter::F32(float v) { Put(buf_, v); }
void ByteWriter::F64(double v) { Put(buf_, v); }

void ByteWriter::Bytes(std::string_view bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::F32Array(std::span<const double> values) {
  buf_.reserve(buf_.size() + values.size() * sizeof(float));
  for (double v : values) F32(static_cast<float>(v));
}

void ByteReader::Need(std::size_t n) const {
  if (remaining() < n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "payload truncated: need " + std::to_string(n) +
                    " more bytes, have " + std::to_string(remaining()));
  }
}

void ByteReader::ExpectMagic(std::string_view magic) {
  if (remaining() < magic.size() ||
      std::memcmp(data_.data() + pos_, magic.data(), magic.size()) != 0) {
    throw Error(ErrorCode::kBadMagic,
                "expected magic '" + std::string(magic) + "'");
  }
  pos_ += magic.size();
}

#define PB_READ_SCALAR(T)                              \
  Need(sizeof(T));                                     \
  T v;                                                 \
  std::memcpy(&v, data_.data() + pos_, sizeof(T));     \
  pos_ += sizeof(T);                                   \
  return v

std::uint16_t ByteReader::U16() { PB_READ_SCALAR(std::uint16_t); }
std::uint32_t ByteReader::U32() { PB_READ_SCALAR(std::uint32_t); }
std::uint64_t ByteReader::U64() { PB_READ_SCALAR(std::uint64_t); }
float ByteReader::F32() { PB_READ_SCALAR(float); }
double ByteReader::F64() { PB_READ_SCALAR(double); }

#undef PB_READ_SCALAR

std::string ByteReader::Bytes(std::size_t n) {
  Need(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

void ByteReader::F32Array(std::span<double> out) {
  Need(out.size() * sizeof(float));
  for (double& v : out) v = static_cast<double>(F32());
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorCode::kIoFailure, "read failed: " + path.string());
  }
  return bytes;
}

void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIoFailure, "cannot open " + tmp.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw Error(ErrorCode::kIoFailure, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIoFailure, "rename failed: " + path.string());
  }
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view text) {
  WriteFileAtomic(path, std::span<const std::uint8_t>(
                            reinterpret_cast<const std::uint8_t*>(text.data()),
                            text.size()));
}

}  // namespace prosodybench::internal
