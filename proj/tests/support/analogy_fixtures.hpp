// Vocabularies whose analogy rows are known by construction, and matrices
// built from them.

#pragma once

#include "xflow/eval.hpp"
#include "xflow/random.hpp"
#include "xflow/vocab.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace xflow::test {

struct PlantedEntry {
  std::string text;
  std::string row;     // template the harness groups by
  std::string variant; // attribute that differs within a row
};

struct PlantedFamily {
  AnalogyFamily family;
  std::vector<PlantedEntry> entries;
};

inline std::string fmt_base(const std::string &op, const std::string &flag,
                            const std::string &type) {
  return "<%ID> = " + op + (flag.empty() ? "" : " " + flag) + " " + type +
         " <%ID>, <%ID>";
}

inline std::vector<PlantedFamily> planted_families() {
  const std::vector<std::string> types{"i8", "i16", "i32", "i64", "float", "double"};
  std::vector<PlantedFamily> out;

  PlantedFamily ty{AnalogyFamily::Types, {}};
  const std::vector<std::string> shapes{
      "<%ID> = add T <%ID>, <%ID>", "<%ID> = load T, T* <%ID>, align 4",
      "store T <%ID>, T* <%ID>, align 4", "ret T <%ID>",
      "<%ID> = alloca T, align 8", "<%ID> = call T <@ID>(i1 <%ID>)"};
  for (std::size_t s = 0; s < shapes.size(); ++s)
    for (const auto &t : types) {
      std::string text;
      for (char c : shapes[s])
        text += c == 'T' ? t : std::string(1, c);
      ty.entries.push_back({text, "shape" + std::to_string(s), t});
    }
  out.push_back(ty);

  PlantedFamily opt{AnalogyFamily::Options, {}};
  for (const auto &op : {"add", "sub", "mul", "shl"})
    for (const auto &t : {"i16", "i32", "i64"}) {
      std::string row = std::string(op) + " " + t;
      opt.entries.push_back({fmt_base(op, "", t), row, ""});
      for (const auto &flag : {"nsw", "nuw"})
        opt.entries.push_back({fmt_base(op, flag, t), row, flag});
    }
  out.push_back(opt);

  PlantedFamily conv{AnalogyFamily::Conversions, {}};
  const std::vector<std::string> convs{"bitcast", "trunc", "sext", "zext",
                                       "fptrunc", "fpext"};
  const std::vector<std::pair<std::string, std::string>> casts{
      {"i64", "i32"}, {"i32", "i8"}, {"<2 x i64>", "<2 x i32>"},
      {"double", "float"}, {"i16", "i64"}};
  for (std::size_t k = 0; k < casts.size(); ++k)
    for (const auto &c : convs)
      conv.entries.push_back({"<%ID> = " + c + " " + casts[k].first +
                                  " <%ID> to " + casts[k].second,
                              "cast" + std::to_string(k), c});
  out.push_back(conv);

  PlantedFamily ds{AnalogyFamily::DataStructures, {}};
  const std::vector<std::string> holders{
      "<%ID> = alloca X, align 8", "<%ID> = load X, X* <%ID>, align 8",
      "store X <%ID>, X* <%ID>, align 8"};
  for (std::size_t h = 0; h < holders.size(); ++h)
    for (const auto &t : types)
      for (bool vec : {false, true}) {
        std::string agg = vec ? "<2 x " + t + ">" : "{ " + t + ", " + t + " }";
        std::string text;
        for (char c : holders[h])
          text += c == 'X' ? agg : std::string(1, c);
        ds.entries.push_back({text, "holder" + std::to_string(h) + t,
                              vec ? "vector" : "struct"});
      }
  out.push_back(ds);
  return out;
}

// Counts are chosen so every entry survives the default cutoff.
inline StmtVocab vocab_of(const std::vector<PlantedEntry> &entries) {
  StatementCounts c;
  for (const auto &e : entries)
    c.add(e.text, 5);
  return build_vocab(c, 1);
}

// Row vector = template component + variant component, both Gaussian, so
// a - b + c lands exactly on the expected statement.
inline EmbeddingMatrix planted_matrix(const StmtVocab &v,
                                      const std::vector<PlantedEntry> &entries,
                                      std::uint32_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<float> g;
  std::map<std::string, std::vector<float>> comp;
  auto component = [&](const std::string &key) -> const std::vector<float> & {
    auto &c = comp[key];
    if (c.empty())
      for (std::uint32_t d = 0; d < dim; ++d)
        c.push_back(g(rng));
    return c;
  };
  EmbeddingMatrix m(static_cast<std::uint32_t>(v.size()), dim);
  for (std::uint32_t d = 0; d < dim; ++d)
    m.row(0)[d] = g(rng);
  for (const auto &e : entries) {
    auto id = v.id(e.text);
    const auto &t = component("row:" + e.row);
    const auto &a = component("variant:" + e.variant);
    for (std::uint32_t d = 0; d < dim; ++d)
      m.row(id)[d] = t[d] + a[d];
  }
  return m;
}

inline EmbeddingMatrix gaussian_matrix(std::uint32_t rows, std::uint32_t dim,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<float> g;
  EmbeddingMatrix m(rows, dim);
  for (auto &x : m.values)
    x = g(rng);
  return m;
}

} // namespace xflow::test
