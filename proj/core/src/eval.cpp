//===- eval.cpp - Embedding space evaluation -------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/eval.hpp"

#include "xflow/category.hpp"
#include "xflow/error.hpp"
#include "xflow/random.hpp"
#include "xflow/syntax.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace xflow {
namespace {

constexpr std::array<std::string_view, 6> kScalarTypes = {
    "i8", "i16", "i32", "i64", "float", "double"};

constexpr std::array<std::string_view, 14> kFlags = {
    "fast", "nnan",     "ninf",   "nsz",   "arcp",   "contract", "afn",
    "reassoc", "nsw",   "nuw",    "exact", "inbounds", "volatile", "tail"};

constexpr std::array<std::string_view, 6> kConversions = {
    "bitcast", "trunc", "sext", "zext", "fptrunc", "fpext"};

// The marker cannot occur in normalized text.
constexpr std::string_view kHole = "\x01";

template <std::size_t N>
bool one_of(std::string_view w, const std::array<std::string_view, N> &set) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

// template text -> attribute value -> vocabulary id
using Rows = std::map<std::string, std::map<std::string, std::uint32_t>>;

// Replaces every token for which `pick` holds; returns nullopt if none did.
template <class Pred>
std::optional<std::string> replace_tokens(std::string_view text,
                                          std::string_view with, Pred pick,
                                          bool drop_gap = false) {
  auto toks = syntax::lex(text);
  std::string out;
  std::size_t prev = 0;
  bool any = false;
  for (const auto &t : toks) {
    if (!pick(t))
      continue;
    std::size_t cut = t.begin;
    if (drop_gap)
      while (cut > prev && text[cut - 1] == ' ')
        --cut;
    out.append(text.substr(prev, cut - prev));
    out.append(with);
    prev = t.end();
    any = true;
  }
  if (!any)
    return std::nullopt;
  out.append(text.substr(prev));
  return out;
}

std::string replace_all(std::string_view text, std::string_view what,
                        std::string_view with) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto at = text.find(what, pos);
    if (at == std::string_view::npos)
      break;
    out.append(text.substr(pos, at - pos));
    out.append(with);
    pos = at + what.size();
  }
  out.append(text.substr(pos));
  return out;
}

void type_rows(const StmtVocab &v, Rows &rows) {
  for (std::uint32_t id = 1; id < v.size(); ++id) {
    const auto &text = v.text(id);
    for (auto ty : kScalarTypes) {
      auto tmpl = replace_tokens(text, kHole, [ty](const syntax::Token &t) {
        return t.word(ty);
      });
      if (tmpl)
        rows[*tmpl].emplace(std::string(ty), id);
    }
  }
}

void option_rows(const StmtVocab &v, Rows &rows) {
  for (std::uint32_t id = 1; id < v.size(); ++id) {
    const auto &text = v.text(id);
    for (auto flag : kFlags) {
      auto base = replace_tokens(
          text, "", [flag](const syntax::Token &t) { return t.word(flag); },
          true);
      if (!base)
        continue;
      auto base_id = v.find(*base);
      if (!base_id)
        continue;
      // Variants are the flags, so two rows pair up only on a shared flag.
      auto &row = rows[*base];
      row.emplace(std::string(flag), id);
      row.emplace("", *base_id);
    }
  }
}

void conversion_rows(const StmtVocab &v, Rows &rows) {
  for (std::uint32_t id = 1; id < v.size(); ++id) {
    const auto &text = v.text(id);
    auto sc = syntax::scan_statement(text, syntax::looks_like_named_type);
    if (!sc.opcode_token || !one_of(sc.opcode, kConversions))
      continue;
    const auto &op = sc.tokens[*sc.opcode_token];
    std::string tmpl(text.substr(0, op.begin));
    tmpl += kHole;
    tmpl += text.substr(op.end());
    rows[tmpl].emplace(sc.opcode, id);
  }
}

void structure_rows(const StmtVocab &v, Rows &rows) {
  for (std::uint32_t id = 1; id < v.size(); ++id) {
    const auto &text = v.text(id);
    for (auto ty : kScalarTypes) {
      std::string st = fmt::format("{{ {0}, {0} }}", ty);
      std::string vec = fmt::format("<2 x {}>", ty);
      bool has_st = text.find(st) != std::string::npos;
      bool has_vec = text.find(vec) != std::string::npos;
      if (has_st == has_vec)
        continue;
      std::string hole = std::string(kHole) + std::string(ty);
      auto tmpl = replace_all(text, has_st ? st : vec, hole);
      rows[tmpl].emplace(has_st ? "struct" : "vector", id);
    }
  }
}

void items_from_rows(const Rows &rows, AnalogyFamily fam,
                     const AnalogyOptions &opts, Rng &rng,
                     std::vector<AnalogyItem> &out) {
  std::vector<const std::map<std::string, std::uint32_t> *> useful;
  for (const auto &[_, row] : rows)
    if (row.size() >= 2)
      useful.push_back(&row);
  std::vector<AnalogyItem> kept;
  std::size_t seen = 0;
  for (const auto *X : useful)
    for (const auto *Y : useful) {
      if (X == Y)
        continue;
      for (const auto &[v1, x1] : *X)
        for (const auto &[v2, x2] : *X) {
          if (v1 == v2)
            continue;
          auto y1 = Y->find(v1);
          auto y2 = Y->find(v2);
          if (y1 == Y->end() || y2 == Y->end())
            continue;
          AnalogyItem item{x2, x1, y1->second, {y2->second}, fam};
          // Reservoir sampling keeps a uniform subset of bounded size.
          if (kept.size() < opts.max_per_family) {
            kept.push_back(std::move(item));
          } else {
            auto j = uniform_below(rng, seen + 1);
            if (j < opts.max_per_family)
              kept[j] = std::move(item);
          }
          ++seen;
        }
    }
  out.insert(out.end(), kept.begin(), kept.end());
}

// Unit-normalized copy of the matrix; zero rows stay zero.
struct UnitRows {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<double> v;

  explicit UnitRows(const EmbeddingMatrix &m) : rows(m.rows), dim(m.dim) {
    v.resize(m.values.size());
    for (std::uint32_t r = 0; r < rows; ++r) {
      double n = 0;
      for (std::uint32_t d = 0; d < dim; ++d) {
        double x = m.values[std::size_t{r} * dim + d];
        n += x * x;
      }
      n = n > 0 ? 1.0 / std::sqrt(n) : 0.0;
      for (std::uint32_t d = 0; d < dim; ++d)
        v[std::size_t{r} * dim + d] = m.values[std::size_t{r} * dim + d] * n;
    }
  }

  std::vector<std::pair<std::uint32_t, double>>
  top(const std::vector<double> &query, std::size_t k,
      const std::vector<std::uint32_t> &excluded) const {
    double qn = 0;
    for (double x : query)
      qn += x * x;
    qn = qn > 0 ? 1.0 / std::sqrt(qn) : 0.0;
    std::vector<std::pair<std::uint32_t, double>> all;
    all.reserve(rows);
    for (std::uint32_t r = 0; r < rows; ++r) {
      if (std::find(excluded.begin(), excluded.end(), r) != excluded.end())
        continue;
      double s = 0;
      const double *row = &v[std::size_t{r} * dim];
      for (std::uint32_t d = 0; d < dim; ++d)
        s += row[d] * query[d];
      all.emplace_back(r, s * qn);
    }
    k = std::min(k, all.size());
    auto better = [](const auto &x, const auto &y) {
      return x.second != y.second ? x.second > y.second : x.first < y.first;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<long>(k),
                      all.end(), better);
    all.resize(k);
    return all;
  }
};

std::vector<double> offset_query(const EmbeddingMatrix &m,
                                 const AnalogyItem &it) {
  std::vector<double> q(m.dim);
  auto a = m.row(it.a), b = m.row(it.b), c = m.row(it.c);
  for (std::uint32_t d = 0; d < m.dim; ++d)
    q[d] = double{a[d]} - double{b[d]} + double{c[d]};
  return q;
}

bool check_item(const UnitRows &u, const EmbeddingMatrix &m,
                const AnalogyItem &it, std::size_t k) {
  for (auto id : {it.a, it.b, it.c})
    if (id >= m.rows)
      throw Error(ErrorCode::UnknownId,
                  fmt::format("analogy refers to row {}", id));
  auto top = u.top(offset_query(m, it), k, {it.a, it.b, it.c});
  for (const auto &[id, _] : top)
    if (std::find(it.expected.begin(), it.expected.end(), id) !=
        it.expected.end())
      return true;
  return false;
}

} // namespace

std::string_view to_string(AnalogyFamily f) noexcept {
  switch (f) {
  case AnalogyFamily::Types:
    return "types";
  case AnalogyFamily::Options:
    return "options";
  case AnalogyFamily::Conversions:
    return "conversions";
  case AnalogyFamily::DataStructures:
    return "data-structures";
  }
  return "?";
}

std::string Score::cell() const {
  if (total == 0)
    return "n/a";
  return fmt::format("{}/{} ({:.2f}%)", correct, total, percent());
}

Score AnalogyScore::overall() const {
  Score s;
  for (const auto &f : families) {
    s.correct += f.correct;
    s.total += f.total;
  }
  return s;
}

std::vector<AnalogyItem> generate_analogies(const StmtVocab &vocab,
                                            const AnalogyOptions &opts) {
  std::vector<AnalogyItem> items;
  Rng rng(opts.seed);
  Rows rows;
  type_rows(vocab, rows);
  items_from_rows(rows, AnalogyFamily::Types, opts, rng, items);
  rows.clear();
  option_rows(vocab, rows);
  items_from_rows(rows, AnalogyFamily::Options, opts, rng, items);
  rows.clear();
  conversion_rows(vocab, rows);
  items_from_rows(rows, AnalogyFamily::Conversions, opts, rng, items);
  rows.clear();
  structure_rows(vocab, rows);
  items_from_rows(rows, AnalogyFamily::DataStructures, opts, rng, items);
  return items;
}

std::vector<std::pair<std::uint32_t, double>>
rank(const EmbeddingMatrix &m, const std::vector<double> &query,
     std::size_t k, const std::vector<std::uint32_t> &excluded) {
  if (query.size() != m.dim)
    throw Error(ErrorCode::InvalidArgument, "query has the wrong dimension");
  return UnitRows(m).top(query, k, excluded);
}

bool analogy_correct(const AnalogyItem &item, const EmbeddingMatrix &m,
                     std::size_t k) {
  return check_item(UnitRows(m), m, item, k);
}

AnalogyScore score_analogies(const std::vector<AnalogyItem> &items,
                             const EmbeddingMatrix &m, std::size_t k) {
  AnalogyScore s;
  if (items.empty())
    return s;
  UnitRows u(m);
  for (const auto &it : items) {
    auto &f = s.families[static_cast<std::size_t>(it.family)];
    ++f.total;
    if (check_item(u, m, it, k))
      ++f.correct;
  }
  return s;
}

std::vector<DistanceTest> generate_distance_tests(const StmtVocab &vocab,
                                                  std::size_t count,
                                                  std::uint64_t seed) {
  std::map<StatementCategory, std::vector<std::uint32_t>> by_cat;
  for (std::uint32_t id = 1; id < vocab.size(); ++id)
    by_cat[categorize(vocab.text(id))].push_back(id);
  if (by_cat.size() < 2)
    return {};
  // Anchors come from categories with at least two members.
  std::vector<std::uint32_t> anchors;
  std::vector<StatementCategory> cat_of(vocab.size(), StatementCategory::Other);
  for (const auto &[cat, ids] : by_cat)
    for (auto id : ids) {
      cat_of[id] = cat;
      if (ids.size() >= 2)
        anchors.push_back(id);
    }
  if (anchors.empty())
    return {};
  const auto total = static_cast<std::uint64_t>(vocab.size() - 1);
  Rng rng(seed);
  std::vector<DistanceTest> out;
  out.reserve(count);
  while (out.size() < count) {
    auto a = anchors[uniform_below(rng, anchors.size())];
    const auto &same = by_cat[cat_of[a]];
    std::uint32_t b;
    do
      b = same[uniform_below(rng, same.size())];
    while (b == a);
    std::uint32_t c;
    do
      c = static_cast<std::uint32_t>(1 + uniform_below(rng, total));
    while (cat_of[c] == cat_of[a]);
    out.push_back(DistanceTest{a, b, c});
  }
  return out;
}

Score score_distance_tests(const std::vector<DistanceTest> &tests,
                           const EmbeddingMatrix &m) {
  Score s;
  for (const auto &t : tests) {
    for (auto id : {t.a, t.b, t.c})
      if (id >= m.rows)
        throw Error(ErrorCode::UnknownId,
                    fmt::format("distance test refers to row {}", id));
    ++s.total;
    if (cosine(m.row(t.a), m.row(t.b)) > cosine(m.row(t.a), m.row(t.c)))
      ++s.correct;
  }
  return s;
}

std::vector<std::pair<std::uint32_t, double>>
nearest(const EmbeddingMatrix &m, std::uint32_t id, std::size_t k) {
  if (id >= m.rows)
    throw Error(ErrorCode::UnknownId,
                fmt::format("id {} is outside a vocabulary of {}", id, m.rows));
  if (k < 1)
    throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  auto r = m.row(id);
  std::vector<double> q(r.begin(), r.end());
  return UnitRows(m).top(q, k, {id});
}

std::string export_clusters(const EmbeddingMatrix &m, const StmtVocab &vocab) {
  std::string out = "id\tcategory\tvector\n";
  if (m.rows == 0)
    return out;
  if (m.rows != vocab.size())
    throw Error(ErrorCode::VocabMismatch,
                "matrix and vocabulary have different sizes");
  for (std::uint32_t id = 0; id < m.rows; ++id) {
    out += fmt::format("{}\t{}\t", id, to_string(categorize(vocab.text(id))));
    auto r = m.row(id);
    for (std::uint32_t d = 0; d < m.dim; ++d) {
      if (d)
        out.push_back(',');
      out += fmt::format("{}", r[d]);
    }
    out.push_back('\n');
  }
  return out;
}

std::string EvalReport::to_tsv() const {
  std::string out = "context_type\tcontext_size\ttypes\toptions\tconversions"
                    "\tdata_structures\tdistance_tests\n";
  std::string type(to_string(context_type));
  std::transform(type.begin(), type.end(), type.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  out += fmt::format("{}\t{}", type, context_size);
  for (const auto &f : analogies.families)
    out += "\t" + f.cell();
  out += "\t" + distance.cell() + "\n";
  return out;
}

} // namespace xflow
