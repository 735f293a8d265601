//===- hash.cpp - SHA-256 helpers ------------------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/hash.hpp"

#include <openssl/sha.h>

namespace xflow {

Digest sha256(std::string_view bytes) {
  Digest d{};
  SHA256(reinterpret_cast<const unsigned char *>(bytes.data()), bytes.size(),
         d.data());
  return d;
}

std::string to_hex(const Digest &d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : d) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

} // namespace xflow
