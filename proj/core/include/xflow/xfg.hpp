//===- xflow/xfg.hpp - Contextual flow graph --------------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Nodes are SSA values and labels; edges are either data edges carrying the
// statement that consumes the source and defines the target, or
// statement-less execution edges. Node names are qualified by their owner:
//
//   <root>      program root (label)
//   @f          function f; also the label of its entry block
//   @f/%bb      other block labels (label)
//   @f/%x       local values and parameters (variable)
//   @g          global variables (variable)
//   @f/$op.N    sink for the N-th statement of f when it defines no value
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/ir.hpp"
#include "xflow/normalizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xflow {

enum class NodeKind : std::uint8_t { Variable, Label };
enum class EdgeKind : std::uint8_t { Data, Execution };

std::string_view to_string(NodeKind k) noexcept;
std::string_view to_string(EdgeKind k) noexcept;

using NodeId = std::uint32_t;
using StmtId = std::uint32_t;

struct XfgNode {
  NodeKind kind = NodeKind::Variable;
  std::string name;
  std::string owner; // function name or "<root>"
};

struct XfgEdge {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeKind kind = EdgeKind::Data;
  /// Present iff kind == Data.
  std::optional<StmtId> stmt;
};

/// One statement occurrence riding on data edges.
struct XfgStatement {
  std::string text; // normalized
  const IrStatement *origin = nullptr;
};

enum class PhiLabelSource {
  Predecessor, // edge from each incoming block's label
  OwnBlock,    // edge from the label of the block holding the phi
};

struct XfgOptions {
  PhiLabelSource phi_label = PhiLabelSource::Predecessor;
};

class Xfg {
public:
  NodeId add_node(NodeKind kind, std::string name, std::string owner);
  std::optional<NodeId> find_node(std::string_view name) const;

  StmtId add_statement(std::string text, const IrStatement *origin);
  void add_data_edge(NodeId src, NodeId dst, StmtId stmt);
  /// Execution edges are kept unique per (src, dst).
  void add_execution_edge(NodeId src, NodeId dst);

  const std::vector<XfgNode> &nodes() const noexcept { return nodes_; }
  const std::vector<XfgEdge> &edges() const noexcept { return edges_; }
  const std::vector<XfgStatement> &statements() const noexcept {
    return stmts_;
  }
  /// Data edges carrying each statement.
  const std::vector<std::vector<std::uint32_t>> &stmt_index() const noexcept {
    return stmt_edges_;
  }
  const std::vector<std::string> &warnings() const noexcept {
    return warnings_;
  }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  /// `src_kind:src<TAB>dst_kind:dst<TAB>edge_kind<TAB>stmt` per edge, in
  /// insertion order.
  std::vector<std::string> edge_lines() const;
  std::string to_edge_list() const;
  std::string to_dot() const;

  /// Checks the data-edge/statement invariants; returns violations.
  std::vector<std::string> validate() const;

private:
  std::vector<XfgNode> nodes_;
  std::vector<XfgEdge> edges_;
  std::vector<XfgStatement> stmts_;
  std::vector<std::vector<std::uint32_t>> stmt_edges_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::unordered_map<std::uint64_t, std::uint32_t> exec_seen_;
  std::vector<std::string> warnings_;
};

Xfg build_xfg(const IrModule &module, const NormalizedModule &normalized,
              const XfgOptions &options = {});

/// Convenience overload that normalizes internally.
Xfg build_xfg(const IrModule &module, const XfgOptions &options = {});

} // namespace xflow
