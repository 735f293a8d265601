//===- xflow/vocab.hpp - Statement vocabulary and pair streams --*- C++ -*-===//
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
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xflow {

inline constexpr std::uint32_t kUnknownId = 0;
inline constexpr std::string_view kUnknownToken = "!UNK";

/// Occurrence counts of normalized statements. Merge is associative, so
/// per-file counters can be reduced in any grouping.
class StatementCounts {
public:
  void add(std::string_view text, std::uint64_t n = 1);
  void merge(const StatementCounts &other);
  const std::map<std::string, std::uint64_t, std::less<>> &counts() const {
    return counts_;
  }
  std::uint64_t total() const noexcept { return total_; }

private:
  std::map<std::string, std::uint64_t, std::less<>> counts_;
  std::uint64_t total_ = 0;
};

class StmtVocab {
public:
  /// Vocabulary holding only the unknown token.
  StmtVocab();

  std::size_t size() const noexcept { return texts_.size(); }
  std::uint64_t cutoff() const noexcept { return cutoff_; }
  /// Id of `text`, or kUnknownId.
  std::uint32_t id(std::string_view text) const;
  std::optional<std::uint32_t> find(std::string_view text) const;
  const std::string &text(std::uint32_t id) const { return texts_.at(id); }
  /// For the unknown token: total occurrences of dropped statements.
  std::uint64_t count(std::uint32_t id) const { return counts_.at(id); }

  /// `id<TAB>count<TAB>text` lines; tabs, newlines and backslashes in text
  /// are escaped.
  std::string serialize() const;
  static StmtVocab parse(std::string_view data);
  void save(const std::filesystem::path &path) const;
  static StmtVocab load(const std::filesystem::path &path);
  /// SHA-256 of the serialized form; binds embeddings to this vocabulary.
  Digest hash() const;

  friend bool operator==(const StmtVocab &a, const StmtVocab &b) {
    return a.texts_ == b.texts_ && a.counts_ == b.counts_;
  }

private:
  friend StmtVocab build_vocab(const StatementCounts &, std::uint64_t);
  void push(std::string text, std::uint64_t count);

  std::vector<std::string> texts_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::uint64_t cutoff_ = 1;
};

/// Keeps statements with count >= cutoff, ordered by descending count and
/// then by text. Throws Error(EmptyVocab) when nothing survives.
StmtVocab build_vocab(const StatementCounts &counts, std::uint64_t cutoff);

using IdPair = std::pair<std::uint32_t, std::uint32_t>;

struct PairStream {
  std::vector<IdPair> pairs;
  std::vector<std::string> sources;

  friend bool operator==(const PairStream &, const PairStream &) = default;
};

/// Maps statement-text pairs to ids, dropping pairs that touch a statement
/// outside the vocabulary.
void append_pairs(PairStream &out, const StmtVocab &vocab,
                  const std::vector<std::string> &texts,
                  const std::vector<IdPair> &node_pairs);

/// Keeps each pair with probability min(1, sqrt(t / f)), f being the
/// pair's share of the stream.
PairStream subsample(const PairStream &in, double t, std::uint64_t seed);

/// `XFGPAIR1` followed by (u32 target, u32 context) little-endian records.
std::string serialize_pairs(const std::vector<IdPair> &pairs);
std::vector<IdPair> parse_pairs(std::string_view data);
void save_pairs(const PairStream &pairs, const std::filesystem::path &path);
PairStream load_pairs(const std::filesystem::path &path);

/// Per-source summary of a training corpus.
struct SourceManifest {
  std::string name;
  std::size_t files = 0;
  std::size_t ir_lines = 0;
  std::vector<std::string> statements; // distinct normalized texts
  std::size_t pairs = 0;
  std::size_t pairs_subsampled = 0;
};

struct CorpusStatsRow {
  std::string source;
  std::size_t files = 0;
  std::size_t ir_lines = 0;
  std::size_t vocabulary = 0;
  std::size_t pairs = 0;
  std::size_t pairs_subsampled = 0;

  friend bool operator==(const CorpusStatsRow &,
                         const CorpusStatsRow &) = default;
};

struct CorpusStats {
  std::vector<CorpusStatsRow> rows;
  CorpusStatsRow combined;

  std::string to_tsv() const;
};

CorpusStats corpus_stats(const std::vector<SourceManifest> &manifests);

} // namespace xflow
