//===- xflow/eval.hpp - Embedding space evaluation --------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/dual_graph.hpp"
#include "xflow/embedding.hpp"
#include "xflow/vocab.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xflow {

enum class AnalogyFamily { Types, Options, Conversions, DataStructures };
inline constexpr std::size_t kAnalogyFamilies = 4;

std::string_view to_string(AnalogyFamily f) noexcept;

/// "a is to b as c is to ?", answered by the neighbours of a - b + c.
struct AnalogyItem {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;
  std::vector<std::uint32_t> expected;
  AnalogyFamily family = AnalogyFamily::Types;

  friend bool operator==(const AnalogyItem &, const AnalogyItem &) = default;
};

struct AnalogyOptions {
  /// Items kept per family; larger candidate sets are sampled down.
  std::size_t max_per_family = 1000;
  std::uint64_t seed = 1;
};

/// Rows of statements that differ in exactly one attribute (scalar type,
/// a flag token, a conversion opcode, or struct-vs-vector form); every two
/// rows sharing two attribute values yield items in both directions.
std::vector<AnalogyItem> generate_analogies(const StmtVocab &vocab,
                                            const AnalogyOptions &opts = {});

struct Score {
  std::size_t correct = 0;
  std::size_t total = 0;

  double percent() const noexcept {
    return total ? 100.0 * static_cast<double>(correct) /
                       static_cast<double>(total)
                 : 0.0;
  }
  /// "226/560 (40.36%)", or "n/a" for an empty score.
  std::string cell() const;
};

struct AnalogyScore {
  std::array<Score, kAnalogyFamilies> families{};
  Score overall() const;
};

/// Top-k cosine neighbours of `query` among all rows except `excluded`,
/// best first, ties broken by ascending id.
std::vector<std::pair<std::uint32_t, double>>
rank(const EmbeddingMatrix &m, const std::vector<double> &query,
     std::size_t k, const std::vector<std::uint32_t> &excluded);

bool analogy_correct(const AnalogyItem &item, const EmbeddingMatrix &m,
                     std::size_t k = 5);

AnalogyScore score_analogies(const std::vector<AnalogyItem> &items,
                             const EmbeddingMatrix &m, std::size_t k = 5);

/// Passes when d(a, b) < d(a, c) under cosine distance.
struct DistanceTest {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;

  friend bool operator==(const DistanceTest &, const DistanceTest &) = default;
};

/// a and b share a statement category, c comes from another one. The
/// unknown token never takes part.
std::vector<DistanceTest> generate_distance_tests(const StmtVocab &vocab,
                                                  std::size_t count,
                                                  std::uint64_t seed);

Score score_distance_tests(const std::vector<DistanceTest> &tests,
                           const EmbeddingMatrix &m);

/// k most similar rows to `id`, excluding itself. Throws Error(UnknownId).
std::vector<std::pair<std::uint32_t, double>>
nearest(const EmbeddingMatrix &m, std::uint32_t id, std::size_t k);

/// Header line, then `id<TAB>category<TAB>v1,...,vD` per vocabulary entry.
std::string export_clusters(const EmbeddingMatrix &m, const StmtVocab &vocab);

struct EvalReport {
  ContextType context_type = ContextType::Xfg;
  int context_size = 2;
  AnalogyScore analogies;
  Score distance;

  /// Header plus one row: context type and size, the four analogy
  /// families and the distance tests.
  std::string to_tsv() const;
};

} // namespace xflow
