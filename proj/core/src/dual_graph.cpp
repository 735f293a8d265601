//===- dual_graph.cpp - Statement adjacency and contexts -------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/dual_graph.hpp"

#include "xflow/error.hpp"

#include <algorithm>

namespace xflow {

std::string_view to_string(ContextType t) noexcept {
  switch (t) {
  case ContextType::Xfg:
    return "xfg";
  case ContextType::Cfg:
    return "cfg";
  case ContextType::Dfg:
    return "dfg";
  }
  return "?";
}

std::optional<ContextType> context_type_from_string(std::string_view s) {
  if (s == "xfg" || s == "XFG")
    return ContextType::Xfg;
  if (s == "cfg" || s == "CFG")
    return ContextType::Cfg;
  if (s == "dfg" || s == "DFG")
    return ContextType::Dfg;
  return std::nullopt;
}

StatementGraph::StatementGraph(std::vector<std::string> texts,
                               std::vector<Edge> edges)
    : texts_(std::move(texts)) {
  const auto n = static_cast<std::uint32_t>(texts_.size());
  std::vector<Edge> dir;
  dir.reserve(edges.size() * 2);
  for (const auto &e : edges) {
    if (e.a == e.b)
      continue;
    if (e.a >= n || e.b >= n)
      throw Error(ErrorCode::InvalidArgument,
                  "dual graph edge refers to a missing statement");
    dir.push_back(Edge{e.a, e.b, e.flags});
    dir.push_back(Edge{e.b, e.a, e.flags});
  }
  std::sort(dir.begin(), dir.end(), [](const Edge &x, const Edge &y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < dir.size();) {
    std::size_t j = i;
    std::uint8_t flags = 0;
    while (j < dir.size() && dir[j].a == dir[i].a && dir[j].b == dir[i].b)
      flags |= dir[j++].flags;
    neighbors_.push_back(dir[i].b);
    flags_.push_back(flags);
    ++offsets_[dir[i].a + 1];
    i = j;
  }
  for (std::uint32_t v = 0; v < n; ++v)
    offsets_[v + 1] += offsets_[v];
}

std::span<const std::uint32_t>
StatementGraph::neighbors(std::uint32_t v) const {
  return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::span<const std::uint8_t>
StatementGraph::neighbor_flags(std::uint32_t v) const {
  return {flags_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::vector<StatementGraph::Edge> StatementGraph::edges() const {
  std::vector<Edge> out;
  for (std::uint32_t v = 0; v + 1 < offsets_.size(); ++v)
    for (std::uint32_t k = offsets_[v]; k < offsets_[v + 1]; ++k)
      if (v < neighbors_[k])
        out.push_back(Edge{v, neighbors_[k], flags_[k]});
  return out;
}

StatementGraph StatementGraph::filtered(ContextType type) const {
  std::uint8_t mask = type == ContextType::Xfg ? (kDataAdjacency |
                                                  kExecutionAdjacency)
                      : type == ContextType::Cfg ? kExecutionAdjacency
                                                 : kDataAdjacency;
  std::vector<Edge> kept;
  for (const auto &e : edges())
    if (e.flags & mask)
      kept.push_back(Edge{e.a, e.b, static_cast<std::uint8_t>(e.flags & mask)});
  return StatementGraph(texts_, std::move(kept));
}

StatementGraph dual_graph(const Xfg &xfg) {
  const auto &nodes = xfg.nodes();
  const auto &xedges = xfg.edges();
  std::vector<std::string> texts;
  texts.reserve(xfg.statements().size());
  for (const auto &s : xfg.statements())
    texts.push_back(s.text);

  // Statements whose data edges touch each node.
  std::vector<std::vector<std::uint32_t>> incident(nodes.size());
  for (const auto &e : xedges) {
    if (!e.stmt)
      continue;
    for (NodeId n : {e.src, e.dst}) {
      auto &v = incident[n];
      if (v.empty() || v.back() != *e.stmt)
        v.push_back(*e.stmt);
    }
  }
  for (auto &v : incident) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::vector<StatementGraph::Edge> edges;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto &v = incident[n];
    std::uint8_t flag = nodes[n].kind == NodeKind::Variable
                            ? kDataAdjacency
                            : kExecutionAdjacency;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        edges.push_back({v[i], v[j], flag});
  }
  for (const auto &e : xedges) {
    if (e.kind != EdgeKind::Execution)
      continue;
    for (auto a : incident[e.src])
      for (auto b : incident[e.dst])
        edges.push_back({a, b, kExecutionAdjacency});
  }
  return StatementGraph(std::move(texts), std::move(edges));
}

std::vector<std::pair<std::uint32_t, std::uint32_t>>
context_pairs(const StatementGraph &g, int n) {
  if (n < 1)
    throw Error(ErrorCode::InvalidArgument, "context size must be >= 1");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  const auto size = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> stamp(size, UINT32_MAX);
  std::vector<std::uint32_t> frontier, next, reached;
  for (std::uint32_t s = 0; s < size; ++s) {
    frontier.assign(1, s);
    reached.clear();
    stamp[s] = s;
    for (int d = 0; d < n && !frontier.empty(); ++d) {
      next.clear();
      for (auto v : frontier)
        for (auto w : g.neighbors(v))
          if (stamp[w] != s) {
            stamp[w] = s;
            next.push_back(w);
            reached.push_back(w);
          }
      frontier.swap(next);
    }
    std::sort(reached.begin(), reached.end());
    for (auto t : reached)
      if (g.text(s) != g.text(t))
        out.emplace_back(s, t);
  }
  return out;
}

} // namespace xflow
