//===- xflow/embedding.hpp - Embedding matrix -------------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/hash.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xflow {

/// Row-major |V| x D matrix of statement vectors.
struct EmbeddingMatrix {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;
  Digest vocab_hash{};
  /// Free-form training metadata (epochs, objective, seed, ...). Not part of
  /// the binary file; tools keep it in a JSON sidecar.
  std::map<std::string, std::string> meta;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::uint32_t rows, std::uint32_t dim)
      : rows(rows), dim(dim), values(std::size_t{rows} * dim, 0.0f) {}

  std::span<float> row(std::uint32_t i) {
    return {values.data() + std::size_t{i} * dim, dim};
  }
  std::span<const float> row(std::uint32_t i) const {
    return {values.data() + std::size_t{i} * dim, dim};
  }

  /// Binary content equality (meta is not compared).
  friend bool operator==(const EmbeddingMatrix &a, const EmbeddingMatrix &b) {
    return a.rows == b.rows && a.dim == b.dim && a.vocab_hash == b.vocab_hash &&
           a.values == b.values;
  }
};

/// `I2V1`, u32 rows, u32 dim, 32-byte vocab hash, rows*dim f32.
std::string serialize(const EmbeddingMatrix &m);
EmbeddingMatrix parse_embedding(std::string_view data);

/// Throws Error(EmptyVocab) for a matrix without rows.
void save(const EmbeddingMatrix &m, const std::filesystem::path &path);
/// With `expected_vocab_hash`, a mismatch throws Error(HashMismatch).
EmbeddingMatrix load_embedding(const std::filesystem::path &path,
                               const std::optional<Digest> &expected_vocab_hash =
                                   std::nullopt);

double cosine(std::span<const float> a, std::span<const float> b);

} // namespace xflow
