//===- binary_io.hpp - Little-endian record helpers -------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace xflow::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

inline void put_u8(std::string &out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

inline void put_u32(std::string &out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

inline void put_f32(std::string &out, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

/// Bounds-checked cursor; reading past the end throws TruncatedFile.
class Reader {
public:
  Reader(std::string_view data, std::string what)
      : data_(data), what_(std::move(what)) {}

  std::string_view take(std::size_t n) {
    if (data_.size() - pos_ < n)
      throw Error(ErrorCode::TruncatedFile,
                  what_ + ": unexpected end of data at byte " +
                      std::to_string(pos_));
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    std::uint32_t v;
    std::memcpy(&v, take(4).data(), 4);
    return v;
  }
  float f32() {
    float v;
    std::memcpy(&v, take(4).data(), 4);
    return v;
  }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool done() const noexcept { return pos_ == data_.size(); }
  const std::string &what() const noexcept { return what_; }

private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string what_;
};

inline std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path &p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::Io, "cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out)
    throw Error(ErrorCode::Io, "short write to " + p.string());
}

} // namespace xflow::detail
