// Helpers shared by the unit tests and the acceptance runner.

#pragma once

#include "xflow/category.hpp"
#include "xflow/dual_graph.hpp"
#include "xflow/parser.hpp"
#include "xflow/xfg.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace xflow::test {

inline std::filesystem::path fixtures_dir() { return XFLOW_TEST_FIXTURES; }
inline std::filesystem::path data_dir() { return XFLOW_TEST_DATA; }

inline std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<std::string> lines_of(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty())
      out.push_back(l);
  return out;
}

inline std::multiset<std::string> edge_set(const Xfg &g) {
  auto l = g.edge_lines();
  return {l.begin(), l.end()};
}

inline std::multiset<std::string> edge_set(const std::string &xfg_text) {
  auto l = lines_of(xfg_text);
  return {l.begin(), l.end()};
}

inline IrModule parse_ok(std::string_view src) {
  auto r = parse_module(src);
  if (!r.module)
    throw std::runtime_error("fixture failed to parse: " +
                             r.diagnostics.serialize());
  return std::move(*r.module);
}

// One example per category row: a raw IR rendering, the normalized text the
// category table prints, and the category.
struct CategoryRow {
  const char *raw;
  const char *normalized;
  StatementCategory category;
};

inline const std::vector<CategoryRow> &category_rows() {
  using C = StatementCategory;
  static const std::vector<CategoryRow> rows = {
      {"%5 = load <2 x i64>*, <2 x i64>** %3, align 8",
       "<%ID> = load <2 x i64>*, <2 x i64>** <%ID>, align 8", C::VecIntPtr},
      {"%5 = and <8 x i32> %3, %4", "<%ID> = and <8 x i32> <%ID>, <%ID>",
       C::VecInt},
      {"store <2 x { i64, i64 }*> %3, <2 x { i64, i64 }*>* %4, align 8",
       "store <2 x { i64, i64 }*> <%ID>, <2 x { i64, i64 }*>* <%ID>, align 8",
       C::VecStructPtr},
      {"%7 = phi { float, float }* [ %1, %bb ], [ %2, %bb2 ]",
       "<%ID> = phi { float, float }* [ <%ID>, <%ID> ], [ <%ID>, <%ID> ]",
       C::StructPtr},
      {"%c = alloca { i32, i32 }, align 4",
       "<%ID> = alloca { i32, i32 }, align 4", C::Struct},
      {"%7 = phi i8** [ %1, %bb ], [ %2, %bb2 ]",
       "<%ID> = phi i8** [ <%ID>, <%ID> ], [ <%ID>, <%ID> ]", C::IntPtrPtr},
      {"%5 = load i8*, i8** %3, align 8",
       "<%ID> = load i8*, i8** <%ID>, align 8", C::IntPtr},
      {"%5 = add i16 %3, 7", "<%ID> = add i16 <%ID>, <INT>", C::Int},
      {"%5 = bitcast <4 x i32> %3 to <16 x i8>",
       "<%ID> = bitcast <4 x i32> <%ID> to <16 x i8>", C::Conversion},
      {"@x = global i32 5, align 4", "<@ID> = global i32 <INT>, align 4",
       C::GlobalDefinition},
      {"%7 = phi <4 x i8*> [ %1, %bb ], [ %2, %bb2 ]",
       "<%ID> = phi <4 x i8*> [ <%ID>, <%ID> ], [ <%ID>, <%ID> ]",
       C::VecIntPtrElems},
      {"%5 = load { i32 (...)** }*, { i32 (...)** }** %3, align 8",
       "<%ID> = load { i32 (...)** }*, { i32 (...)** }** <%ID>, align 8",
       C::LoadFunctionPtr},
      {"store void ()* @h, void ()** %p, align 8",
       "store void ()* <@ID>, void ()** <%ID>, align 8", C::StoreFunctionPtr},
      {"%7 = phi float** [ %1, %bb ], [ %2, %bb2 ]",
       "<%ID> = phi float** [ <%ID>, <%ID> ], [ <%ID>, <%ID> ]",
       C::FloatPtrPtr},
      {"%5 = icmp eq double* %3, null", "<%ID> = icmp eq double* <%ID>, null",
       C::FloatPtr},
      {"%5 = getelementptr double, double* %3, i64 %4",
       "<%ID> = getelementptr double, double* <%ID>, i64 <%ID>", C::Float},
      {"tail call void @f(i64 3) #4", "tail call void <@ID>(i64 <INT>)",
       C::CallVoid},
      {"cleanup", "cleanup", C::Other},
      {"unreachable", "unreachable", C::Other},
      {"%5 = getelementptr inbounds [8 x [256 x i32]], [8 x [256 x i32]]*",
       "<%ID> = getelementptr inbounds [8 x [256 x i32]], [8 x [256 x i32]]*",
       C::ArrayOfArray},
      {"%5 = alloca [5 x { i8*, i64 }], align 8",
       "<%ID> = alloca [5 x { i8*, i64 }], align 8", C::ArrayOfStruct},
      {"%5 = alloca [100 x i8], align 16", "<%ID> = alloca [100 x i8], align 16",
       C::ArrayOfInt},
      {"%5 = getelementptr inbounds [1024 x double], [1024 x double]*",
       "<%ID> = getelementptr inbounds [1024 x double], [1024 x double]*",
       C::ArrayOfFloat},
      {"%5 = alloca <8 x float>*, align 8", "<%ID> = alloca <8 x float>*, align 8",
       C::VecFloatPtr},
      {"%9 = call <4 x float> @g(float* %x)",
       "<%ID> = call <4 x float> <@ID>(float* <%ID>)", C::VecFloat},
      {"define linkonce_odr void @_ZN1AD2Ev({ i32 (...)** }* %this) "
       "unnamed_addr #0 align 2 {",
       "define linkonce_odr void <@ID>({ i32 (...)** }*) unnamed_addr",
       C::VoidFunctionDef},
      {"invoke void @f(i8* %x) to label %1 unwind label %2",
       "invoke void <@ID>(i8* <%ID>) to label <%ID> unwind label <%ID>",
       C::InvokeVoid},
  };
  return rows;
}

// Ordered pairs (u, v), u != v, at hop distance <= n, by all-pairs BFS,
// dropping pairs whose statement texts are equal.
inline std::set<std::pair<std::uint32_t, std::uint32_t>>
brute_force_pairs(const std::vector<std::vector<std::uint32_t>> &adj,
                  const std::vector<std::string> &texts, int n) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  const auto V = static_cast<std::uint32_t>(adj.size());
  for (std::uint32_t s = 0; s < V; ++s) {
    std::vector<int> dist(V, -1);
    std::vector<std::uint32_t> frontier{s};
    dist[s] = 0;
    for (int d = 1; d <= n; ++d) {
      std::vector<std::uint32_t> next;
      for (auto u : frontier)
        for (auto v : adj[u])
          if (dist[v] < 0) {
            dist[v] = d;
            next.push_back(v);
          }
      frontier = std::move(next);
    }
    for (std::uint32_t t = 0; t < V; ++t)
      if (t != s && dist[t] > 0 && texts[s] != texts[t])
        out.emplace(s, t);
  }
  return out;
}

inline StatementGraph graph_from_adjacency(
    const std::vector<std::vector<std::uint32_t>> &adj,
    std::vector<std::string> texts) {
  std::vector<StatementGraph::Edge> edges;
  for (std::uint32_t u = 0; u < adj.size(); ++u)
    for (auto v : adj[u])
      if (u < v)
        edges.push_back({u, v, kDataAdjacency});
  return StatementGraph(std::move(texts), std::move(edges));
}

inline std::vector<std::string> distinct_texts(std::size_t n) {
  std::vector<std::string> t;
  for (std::size_t i = 0; i < n; ++i)
    t.push_back("s" + std::to_string(i));
  return t;
}

} // namespace xflow::test
