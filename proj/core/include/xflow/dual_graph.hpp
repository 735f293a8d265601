//===- xflow/dual_graph.hpp - Statement adjacency and contexts --*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/xfg.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xflow {

/// Which adjacencies define a statement's context.
enum class ContextType { Xfg, Cfg, Dfg };

std::string_view to_string(ContextType t) noexcept;
std::optional<ContextType> context_type_from_string(std::string_view s);

/// Why two statements are adjacent; an edge may carry both.
enum AdjacencyFlag : std::uint8_t {
  kDataAdjacency = 1,      // their data edges share a value node
  kExecutionAdjacency = 2, // they share a label node or one execution edge
                           // joins their endpoints
};

/// Simple undirected graph over statement occurrences, stored as CSR.
class StatementGraph {
public:
  struct Edge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint8_t flags = 0;
  };

  StatementGraph() = default;
  /// Parallel edges are merged (flags or-ed); self loops are dropped.
  StatementGraph(std::vector<std::string> texts, std::vector<Edge> edges);

  std::size_t size() const noexcept { return texts_.size(); }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }
  const std::string &text(std::uint32_t v) const { return texts_[v]; }
  const std::vector<std::string> &texts() const noexcept { return texts_; }

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const;
  std::span<const std::uint8_t> neighbor_flags(std::uint32_t v) const;
  /// Each undirected edge once, a < b, sorted.
  std::vector<Edge> edges() const;

  /// Keeps only the adjacencies that the context type admits.
  StatementGraph filtered(ContextType type) const;

private:
  std::vector<std::string> texts_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> neighbors_;
  std::vector<std::uint8_t> flags_;
};

StatementGraph dual_graph(const Xfg &xfg);

/// Ordered statement-node pairs at hop distance 1..n, both directions;
/// pairs whose statements have identical text are dropped. Sorted by
/// (target, context).
std::vector<std::pair<std::uint32_t, std::uint32_t>>
context_pairs(const StatementGraph &g, int n);

} // namespace xflow
