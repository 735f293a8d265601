//===- xfg.cpp - Contextual flow graph construction ------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Two passes over the module. The first records function symbols and the
// sink nodes of their return statements, so that call sites seen before the
// callee's body can still be wired to its returns. The second walks every
// statement once and adds its edges; lookups are hash based, so the whole
// construction is linear in the number of statements.
//
//===----------------------------------------------------------------------===//

#include "xflow/xfg.hpp"

#include "xflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace xflow {

std::string_view to_string(NodeKind k) noexcept {
  return k == NodeKind::Variable ? "variable" : "label";
}

std::string_view to_string(EdgeKind k) noexcept {
  return k == EdgeKind::Data ? "data" : "execution";
}

NodeId Xfg::add_node(NodeKind kind, std::string name, std::string owner) {
  auto it = by_name_.find(name);
  if (it != by_name_.end())
    return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  by_name_.emplace(name, id);
  nodes_.push_back(XfgNode{kind, std::move(name), std::move(owner)});
  return id;
}

std::optional<NodeId> Xfg::find_node(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end())
    return std::nullopt;
  return it->second;
}

StmtId Xfg::add_statement(std::string text, const IrStatement *origin) {
  auto id = static_cast<StmtId>(stmts_.size());
  stmts_.push_back(XfgStatement{std::move(text), origin});
  stmt_edges_.emplace_back();
  return id;
}

void Xfg::add_data_edge(NodeId src, NodeId dst, StmtId stmt) {
  stmt_edges_.at(stmt).push_back(static_cast<std::uint32_t>(edges_.size()));
  edges_.push_back(XfgEdge{src, dst, EdgeKind::Data, stmt});
}

void Xfg::add_execution_edge(NodeId src, NodeId dst) {
  std::uint64_t key = (std::uint64_t{src} << 32) | dst;
  if (!exec_seen_.emplace(key, static_cast<std::uint32_t>(edges_.size()))
           .second)
    return;
  edges_.push_back(XfgEdge{src, dst, EdgeKind::Execution, std::nullopt});
}

std::vector<std::string> Xfg::edge_lines() const {
  std::vector<std::string> out;
  out.reserve(edges_.size());
  for (const auto &e : edges_) {
    const auto &s = nodes_[e.src];
    const auto &d = nodes_[e.dst];
    out.push_back(fmt::format("{}:{}\t{}:{}\t{}\t{}", to_string(s.kind),
                              s.name, to_string(d.kind), d.name,
                              to_string(e.kind),
                              e.stmt ? stmts_[*e.stmt].text : std::string()));
  }
  return out;
}

std::string Xfg::to_edge_list() const {
  std::string out;
  for (const auto &l : edge_lines()) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\')
      out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

} // namespace

std::string Xfg::to_dot() const {
  std::ostringstream os;
  os << "digraph xfg {\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    os << "  n" << i << " [label=\"" << dot_escape(nodes_[i].name)
       << "\", shape="
       << (nodes_[i].kind == NodeKind::Label ? "box" : "ellipse") << "];\n";
  for (const auto &e : edges_) {
    os << "  n" << e.src << " -> n" << e.dst;
    if (e.stmt)
      os << " [label=\"" << dot_escape(stmts_[*e.stmt].text) << "\"]";
    else
      os << " [style=dashed, color=blue]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::vector<std::string> Xfg::validate() const {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto &e = edges_[i];
    if (e.src >= nodes_.size() || e.dst >= nodes_.size())
      bad.push_back(fmt::format("edge {} has a dangling endpoint", i));
    if ((e.kind == EdgeKind::Data) != e.stmt.has_value())
      bad.push_back(fmt::format("edge {} violates the kind/statement rule", i));
    if (e.stmt && *e.stmt >= stmts_.size())
      bad.push_back(fmt::format("edge {} names an unknown statement", i));
  }
  for (std::size_t s = 0; s < stmts_.size(); ++s)
    if (stmt_edges_[s].empty())
      bad.push_back(fmt::format("statement {} rides no data edge", s));
  return bad;
}

namespace {

class Builder {
public:
  Builder(const IrModule &m, const NormalizedModule &nm, const XfgOptions &opt)
      : m_(m), nm_(nm), opt_(opt) {}

  Xfg run() {
    root_ = g_.add_node(NodeKind::Label, "<root>", "<root>");
    for (const auto &f : m_.functions)
      functions_.emplace(f.name, &f);
    for (const auto &f : m_.functions)
      if (!f.is_declaration_only)
        register_returns(f);
    for (const auto &gv : m_.globals)
      g_.add_node(NodeKind::Variable, "@" + gv.name, "<root>");
    for (const auto &gv : m_.globals)
      global_definition(gv);
    for (const auto &f : m_.functions)
      if (!f.is_declaration_only)
        function_body(f);
    return std::move(g_);
  }

private:
  static std::string sink_name(const IrFunction &f, const IrStatement &s,
                               std::size_t ordinal) {
    return fmt::format("@{}/${}.{}", f.name, s.opcode, ordinal);
  }

  NodeId function_node(const std::string &name) {
    return g_.add_node(NodeKind::Label, "@" + name, name);
  }

  void register_returns(const IrFunction &f) {
    function_node(f.name);
    auto &rets = returns_[f.name];
    std::size_t ordinal = 0;
    for (const auto &b : f.blocks)
      for (const auto &s : b.statements) {
        if (s.opcode == "ret")
          rets.push_back(
              g_.add_node(NodeKind::Variable, sink_name(f, s, ordinal), f.name));
        ++ordinal;
      }
  }

  // Node for a global symbol; functions are labels, everything else a value.
  NodeId symbol_node(std::string_view text) {
    std::string name(identifier_name(text));
    if (functions_.count(name))
      return function_node(name);
    return g_.add_node(NodeKind::Variable, "@" + name, "<root>");
  }

  void global_definition(const IrGlobal &gv) {
    const auto &def = gv.definition;
    StmtId sid = g_.add_statement(nm_.at(def).text, &def);
    NodeId target = *g_.find_node("@" + gv.name);
    std::vector<NodeId> refs;
    for (const auto &op : def.operands) {
      if (op.kind != OperandKind::GlobalId &&
          op.kind != OperandKind::FunctionRef)
        continue;
      NodeId n = symbol_node(op.text);
      if (n != target && std::find(refs.begin(), refs.end(), n) == refs.end())
        refs.push_back(n);
    }
    if (refs.empty())
      g_.add_data_edge(root_, target, sid);
    for (NodeId r : refs)
      g_.add_data_edge(r, target, sid);
  }

  struct FunctionState {
    const IrFunction *f = nullptr;
    NodeId fnode = 0;
    std::unordered_map<std::string, std::size_t> block_of_label;
    std::unordered_map<std::string, std::size_t> def_block;
    std::unordered_set<NodeId> globals_seen;
    std::unordered_set<std::string> dangling_warned;
  };

  std::string local_name(const FunctionState &st, std::string_view id) const {
    return fmt::format("@{}/%{}", st.f->name, identifier_name(id));
  }

  NodeId label_node(FunctionState &st, std::string_view label_text) {
    std::string label(identifier_name(label_text));
    auto it = st.block_of_label.find(label);
    if (it == st.block_of_label.end()) {
      g_.warn(fmt::format("@{}: branch to unknown label %{}", st.f->name,
                          label));
    } else if (it->second == 0) {
      return st.fnode;
    }
    return g_.add_node(NodeKind::Label, local_name(st, label_text),
                       st.f->name);
  }

  // Returns the node and whether its definition lives in another block.
  std::pair<NodeId, bool> local_input(FunctionState &st, std::string_view text,
                                      std::size_t block) {
    std::string name(identifier_name(text));
    NodeId n =
        g_.add_node(NodeKind::Variable, local_name(st, text), st.f->name);
    auto it = st.def_block.find(name);
    if (it == st.def_block.end()) {
      if (st.dangling_warned.insert(name).second) {
        g_.warn(fmt::format("DanglingUse: @{} uses undefined %{}", st.f->name,
                            name));
        g_.add_execution_edge(st.fnode, n);
      }
      return {n, false};
    }
    return {n, it->second != block};
  }

  NodeId global_input(FunctionState &st, std::string_view text, NodeId label) {
    NodeId n = symbol_node(text);
    if (st.globals_seen.insert(n).second)
      g_.add_execution_edge(label, n);
    return n;
  }

  static void add_unique(std::vector<NodeId> &v, NodeId n) {
    if (std::find(v.begin(), v.end(), n) == v.end())
      v.push_back(n);
  }

  void function_body(const IrFunction &f) {
    FunctionState st;
    st.f = &f;
    st.fnode = function_node(f.name);
    for (std::size_t b = 0; b < f.blocks.size(); ++b)
      st.block_of_label.emplace(f.blocks[b].label, b);
    for (std::size_t b = 0; b < f.blocks.size(); ++b)
      for (const auto &s : f.blocks[b].statements)
        if (s.result)
          st.def_block.emplace(std::string(identifier_name(*s.result)), b);

    StmtId header = g_.add_statement(nm_.at(f.header).text, &f.header);
    g_.add_data_edge(root_, st.fnode, header);
    for (const auto &p : f.params) {
      st.def_block.emplace(p, 0);
      NodeId pn =
          g_.add_node(NodeKind::Variable, "@" + f.name + "/%" + p, f.name);
      g_.add_execution_edge(st.fnode, pn);
    }

    std::size_t ordinal = 0;
    std::vector<NodeId> inputs;
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      const auto &block = f.blocks[b];
      NodeId L = b == 0 ? st.fnode : label_node(st, "%" + block.label);
      for (const auto &s : block.statements) {
        StmtId sid = g_.add_statement(nm_.at(s).text, &s);
        NodeId r = s.result ? g_.add_node(NodeKind::Variable,
                                          local_name(st, *s.result), f.name)
                            : g_.add_node(NodeKind::Variable,
                                          sink_name(f, s, ordinal), f.name);
        ++ordinal;
        inputs.clear();

        if (s.is_phi()) {
          for (const auto &[value, label] : s.phi_incoming()) {
            if (value->kind == OperandKind::LocalId)
              add_unique(inputs, local_input(st, value->text, b).first);
            else if (value->kind == OperandKind::GlobalId ||
                     value->kind == OperandKind::FunctionRef)
              add_unique(inputs, global_input(st, value->text, L));
            NodeId from = opt_.phi_label == PhiLabelSource::Predecessor
                              ? label_node(st, label->text)
                              : L;
            g_.add_execution_edge(from, r);
          }
          for (NodeId u : inputs)
            g_.add_data_edge(u, r, sid);
          if (inputs.empty())
            g_.add_data_edge(L, r, sid);
          continue;
        }

        bool cross_block = false;
        for (std::size_t k = 0; k < s.operands.size(); ++k) {
          const auto &op = s.operands[k];
          if (s.callee && k == *s.callee &&
              (op.kind == OperandKind::FunctionRef ||
               op.kind == OperandKind::GlobalId))
            continue;
          if (op.kind == OperandKind::LocalId) {
            auto [n, other] = local_input(st, op.text, b);
            add_unique(inputs, n);
            cross_block |= other;
          } else if (op.kind == OperandKind::GlobalId ||
                     op.kind == OperandKind::FunctionRef) {
            add_unique(inputs, global_input(st, op.text, L));
          }
        }
        for (NodeId u : inputs)
          g_.add_data_edge(u, r, sid);
        if (inputs.empty())
          g_.add_data_edge(L, r, sid);
        if (cross_block)
          g_.add_execution_edge(L, r);

        if (s.is_terminator())
          for (const auto &op : s.operands)
            if (op.kind == OperandKind::LabelRef)
              g_.add_execution_edge(r, label_node(st, op.text));

        if (s.callee) {
          const auto &callee = s.operands[*s.callee];
          if (callee.kind == OperandKind::FunctionRef ||
              callee.kind == OperandKind::GlobalId)
            call_edges(callee.text, L, r, sid);
        }
      }
    }
  }

  void call_edges(std::string_view callee_text, NodeId L, NodeId r,
                  StmtId sid) {
    std::string name(identifier_name(callee_text));
    auto it = functions_.find(name);
    if (it != functions_.end() && !it->second->is_declaration_only) {
      NodeId target = function_node(name);
      g_.add_execution_edge(L, target);
      for (NodeId ret : returns_[name])
        g_.add_execution_edge(ret, r);
      return;
    }
    NodeId ext = g_.add_node(NodeKind::Label, "@" + name, name);
    g_.add_data_edge(r, ext, sid);
  }

  const IrModule &m_;
  const NormalizedModule &nm_;
  XfgOptions opt_;
  Xfg g_;
  NodeId root_ = 0;
  std::unordered_map<std::string, const IrFunction *> functions_;
  std::unordered_map<std::string, std::vector<NodeId>> returns_;
};

} // namespace

Xfg build_xfg(const IrModule &module, const NormalizedModule &normalized,
              const XfgOptions &options) {
  return Builder(module, normalized, options).run();
}

Xfg build_xfg(const IrModule &module, const XfgOptions &options) {
  NormalizedModule nm(module);
  return build_xfg(module, nm, options);
}

} // namespace xflow
