//===- vocab.cpp - Statement vocabulary and pair streams -------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/vocab.hpp"

#include "binary_io.hpp"
#include "xflow/error.hpp"
#include "xflow/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace xflow {
namespace {

constexpr std::string_view kPairMagic = "XFGPAIR1";

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
    case '\\':
      out += "\\\\";
      break;
    case '\t':
      out += "\\t";
      break;
    case '\n':
      out += "\\n";
      break;
    case '\r':
      out += "\\r";
      break;
    default:
      out.push_back(c);
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    char n = s[++i];
    out.push_back(n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : n);
  }
  return out;
}

template <class T> bool parse_number(std::string_view s, T &out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

} // namespace

void StatementCounts::add(std::string_view text, std::uint64_t n) {
  auto it = counts_.find(text);
  if (it == counts_.end())
    counts_.emplace(std::string(text), n);
  else
    it->second += n;
  total_ += n;
}

void StatementCounts::merge(const StatementCounts &other) {
  for (const auto &[text, n] : other.counts_)
    add(text, n);
}

StmtVocab::StmtVocab() { push(std::string(kUnknownToken), 0); }

void StmtVocab::push(std::string text, std::uint64_t count) {
  ids_.emplace(text, static_cast<std::uint32_t>(texts_.size()));
  texts_.push_back(std::move(text));
  counts_.push_back(count);
}

std::uint32_t StmtVocab::id(std::string_view text) const {
  return find(text).value_or(kUnknownId);
}

std::optional<std::uint32_t> StmtVocab::find(std::string_view text) const {
  auto it = ids_.find(std::string(text));
  if (it == ids_.end() || it->second == kUnknownId)
    return std::nullopt;
  return it->second;
}

std::string StmtVocab::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < texts_.size(); ++i)
    out += fmt::format("{}\t{}\t{}\n", i, counts_[i], escape(texts_[i]));
  return out;
}

StmtVocab StmtVocab::parse(std::string_view data) {
  StmtVocab v;
  v.texts_.clear();
  v.counts_.clear();
  v.ids_.clear();
  std::size_t pos = 0;
  std::size_t line = 0;
  while (pos < data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string_view::npos)
      throw Error(ErrorCode::TruncatedFile,
                  "vocabulary: last line is not terminated");
    std::string_view l = data.substr(pos, nl - pos);
    pos = nl + 1;
    auto t1 = l.find('\t');
    auto t2 = t1 == std::string_view::npos ? t1 : l.find('\t', t1 + 1);
    std::uint32_t id = 0;
    std::uint64_t count = 0;
    if (t2 == std::string_view::npos || !parse_number(l.substr(0, t1), id) ||
        !parse_number(l.substr(t1 + 1, t2 - t1 - 1), count))
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("vocabulary line {} is malformed", line + 1));
    if (id != line)
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("vocabulary ids are not dense at line {}",
                              line + 1));
    v.push(unescape(l.substr(t2 + 1)), count);
    ++line;
  }
  if (v.texts_.empty() || v.texts_[0] != kUnknownToken)
    throw Error(ErrorCode::InvalidArgument,
                "vocabulary does not start with the unknown token");
  return v;
}

void StmtVocab::save(const std::filesystem::path &path) const {
  detail::write_file(path, serialize());
}

StmtVocab StmtVocab::load(const std::filesystem::path &path) {
  return parse(detail::read_file(path));
}

Digest StmtVocab::hash() const { return sha256(serialize()); }

StmtVocab build_vocab(const StatementCounts &counts, std::uint64_t cutoff) {
  if (cutoff < 1)
    throw Error(ErrorCode::InvalidArgument, "cutoff must be >= 1");
  std::vector<std::pair<std::string_view, std::uint64_t>> kept;
  std::uint64_t dropped = 0;
  for (const auto &[text, n] : counts.counts()) {
    if (n >= cutoff && text != kUnknownToken)
      kept.emplace_back(text, n);
    else
      dropped += n;
  }
  if (kept.empty())
    throw Error(ErrorCode::EmptyVocab,
                fmt::format("no statement occurs at least {} times", cutoff));
  std::stable_sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    return a.second > b.second; // input is already sorted by text
  });
  StmtVocab v;
  v.cutoff_ = cutoff;
  v.counts_[0] = dropped;
  for (const auto &[text, n] : kept)
    v.push(std::string(text), n);
  return v;
}

void append_pairs(PairStream &out, const StmtVocab &vocab,
                  const std::vector<std::string> &texts,
                  const std::vector<IdPair> &node_pairs) {
  std::vector<std::uint32_t> ids(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i)
    ids[i] = vocab.id(texts[i]);
  for (const auto &[s, t] : node_pairs) {
    auto a = ids.at(s);
    auto b = ids.at(t);
    if (a != kUnknownId && b != kUnknownId)
      out.pairs.emplace_back(a, b);
  }
}

PairStream subsample(const PairStream &in, double t, std::uint64_t seed) {
  if (!(t > 0))
    throw Error(ErrorCode::InvalidArgument, "subsampling threshold must be > 0");
  PairStream out;
  out.sources = in.sources;
  if (in.pairs.empty())
    return out;
  std::unordered_map<std::uint64_t, std::uint64_t> freq;
  auto key = [](const IdPair &p) {
    return (std::uint64_t{p.first} << 32) | p.second;
  };
  for (const auto &p : in.pairs)
    ++freq[key(p)];
  const double total = static_cast<double>(in.pairs.size());
  Rng rng(seed);
  out.pairs.reserve(in.pairs.size());
  for (const auto &p : in.pairs) {
    double f = static_cast<double>(freq[key(p)]) / total;
    double keep = std::min(1.0, std::sqrt(t / f));
    // A draw is consumed for every pair so the stream position, not the
    // history of decisions, fixes each outcome.
    double u = uniform01(rng);
    if (u < keep)
      out.pairs.push_back(p);
  }
  return out;
}

std::string serialize_pairs(const std::vector<IdPair> &pairs) {
  std::string out(kPairMagic);
  out.reserve(kPairMagic.size() + pairs.size() * 8);
  for (const auto &[a, b] : pairs) {
    detail::put_u32(out, a);
    detail::put_u32(out, b);
  }
  return out;
}

std::vector<IdPair> parse_pairs(std::string_view data) {
  detail::Reader r(data, "pair file");
  if (data.size() < kPairMagic.size())
    throw Error(ErrorCode::TruncatedFile, "pair file: header is incomplete");
  if (r.take(kPairMagic.size()) != kPairMagic)
    throw Error(ErrorCode::BadMagic, "pair file: bad magic");
  if (r.remaining() % 8 != 0)
    throw Error(ErrorCode::TruncatedFile,
                "pair file: trailing partial record");
  std::vector<IdPair> pairs;
  pairs.reserve(r.remaining() / 8);
  while (!r.done()) {
    auto a = r.u32();
    auto b = r.u32();
    pairs.emplace_back(a, b);
  }
  return pairs;
}

void save_pairs(const PairStream &pairs, const std::filesystem::path &path) {
  detail::write_file(path, serialize_pairs(pairs.pairs));
}

PairStream load_pairs(const std::filesystem::path &path) {
  PairStream s;
  s.pairs = parse_pairs(detail::read_file(path));
  return s;
}

CorpusStats corpus_stats(const std::vector<SourceManifest> &manifests) {
  CorpusStats stats;
  stats.combined.source = "combined";
  std::set<std::string_view> all;
  for (const auto &m : manifests) {
    std::set<std::string_view> distinct(m.statements.begin(),
                                        m.statements.end());
    stats.rows.push_back(CorpusStatsRow{m.name, m.files, m.ir_lines,
                                        distinct.size(), m.pairs,
                                        m.pairs_subsampled});
    all.insert(distinct.begin(), distinct.end());
    stats.combined.files += m.files;
    stats.combined.ir_lines += m.ir_lines;
    stats.combined.pairs += m.pairs;
    stats.combined.pairs_subsampled += m.pairs_subsampled;
  }
  stats.combined.vocabulary = all.size();
  return stats;
}

std::string CorpusStats::to_tsv() const {
  std::string out =
      "source\tfiles\tir_lines\tvocabulary\tpairs\tpairs_subsampled\n";
  auto row = [&out](const CorpusStatsRow &r) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", r.source, r.files,
                       r.ir_lines, r.vocabulary, r.pairs, r.pairs_subsampled);
  };
  for (const auto &r : rows)
    row(r);
  row(combined);
  return out;
}

} // namespace xflow
