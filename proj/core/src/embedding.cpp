//===- embedding.cpp - Embedding matrix ------------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/embedding.hpp"

#include "binary_io.hpp"
#include "xflow/error.hpp"

#include <cmath>
#include <cstring>

namespace xflow {
namespace {

constexpr std::string_view kMagic = "I2V1";
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 32;

} // namespace

std::string serialize(const EmbeddingMatrix &m) {
  if (m.values.size() != std::size_t{m.rows} * m.dim)
    throw Error(ErrorCode::InvalidArgument,
                "embedding matrix shape does not match its data");
  std::string out(kMagic);
  out.reserve(kHeaderSize + m.values.size() * 4);
  detail::put_u32(out, m.rows);
  detail::put_u32(out, m.dim);
  out.append(reinterpret_cast<const char *>(m.vocab_hash.data()),
             m.vocab_hash.size());
  out.append(reinterpret_cast<const char *>(m.values.data()),
             m.values.size() * sizeof(float));
  return out;
}

EmbeddingMatrix parse_embedding(std::string_view data) {
  detail::Reader r(data, "embedding file");
  if (data.size() < kMagic.size())
    throw Error(ErrorCode::TruncatedFile, "embedding file: header is incomplete");
  if (r.take(kMagic.size()) != kMagic)
    throw Error(ErrorCode::BadMagic, "embedding file: bad magic");
  EmbeddingMatrix m;
  m.rows = r.u32();
  m.dim = r.u32();
  auto h = r.take(32);
  std::memcpy(m.vocab_hash.data(), h.data(), 32);
  const std::uint64_t n = std::uint64_t{m.rows} * m.dim;
  if (r.remaining() != n * 4)
    throw Error(ErrorCode::TruncatedFile,
                "embedding file: payload size does not match the header");
  m.values.resize(n);
  auto payload = r.take(n * 4);
  std::memcpy(m.values.data(), payload.data(), payload.size());
  return m;
}

void save(const EmbeddingMatrix &m, const std::filesystem::path &path) {
  if (m.rows == 0)
    throw Error(ErrorCode::EmptyVocab, "refusing to save an empty embedding");
  detail::write_file(path, serialize(m));
}

EmbeddingMatrix load_embedding(const std::filesystem::path &path,
                               const std::optional<Digest> &expected) {
  auto m = parse_embedding(detail::read_file(path));
  if (expected && *expected != m.vocab_hash)
    throw Error(ErrorCode::HashMismatch,
                path.string() + " was trained on a different vocabulary");
  return m;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double{a[i]} * b[i];
    na += double{a[i]} * a[i];
    nb += double{b[i]} * b[i];
  }
  if (na == 0 || nb == 0)
    return 0.0;
  return dot / std::sqrt(na * nb);
}

} // namespace xflow
