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

#ifndef PROSODYBENCH_SRC_BINARY_IO_H_
#define PROSODYBENCH_SRC_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prosodybench::internal {

// Append-only little-endian encoder. Buffers the whole file so writers can
// publish it atomically with WriteFileAtomic().
class ByteWriter {
 public:
  void Magic(std::string_view magic);
  void U16(std::uint16_t v);
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void F32(float v);
  void F64(double v);
  void Bytes(std::string_view bytes);
  // Narrows each value to IEEE-754 single precision.
  void F32Array(std::span<const double> values);

  const std::vector<std::uint8_t>& buffer() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked little-endian decoder. Running past the end throws
// DimensionMismatch, since every format here derives payload size from
// header dimensions.
class ByteReader {
 public:
  explicit ByteReader(std::vector<std::uint8_t> data) : data_(std::move(data)) {}

  // Throws BadMagic when the leading bytes differ.
  void ExpectMagic(std::string_view magic);
  std::uint16_t U16();
  std::uint32_t U32();
  std::uint64_t U64();
  float F32();
  double F64();
  std::string Bytes(std::size_t n);
  void F32Array(std::span<double> out);

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(std::size_t n) const;

  std::vector<std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes);
void WriteFileAtomic(const std::filesystem::path& path, std::string_view text);

}  // namespace prosodybench::internal

#endif  // PROSODYBENCH_SRC_BINARY_IO_H_
