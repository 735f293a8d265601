//===- ir.cpp - In-memory LLVM IR model ------------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/ir.hpp"

#include <array>
#include <set>
#include <sstream>
#include <unordered_map>

namespace xflow {

std::string_view to_string(OperandKind kind) noexcept {
  switch (kind) {
  case OperandKind::LocalId:
    return "local-id";
  case OperandKind::GlobalId:
    return "global-id";
  case OperandKind::LabelRef:
    return "label-ref";
  case OperandKind::ImmInt:
    return "immediate-int";
  case OperandKind::ImmFloat:
    return "immediate-float";
  case OperandKind::ImmString:
    return "immediate-string";
  case OperandKind::FunctionRef:
    return "function-ref";
  case OperandKind::UndefNull:
    return "undef/null";
  case OperandKind::ConstantExpr:
    return "constant-expr";
  }
  return "?";
}

std::string_view identifier_name(std::string_view token) noexcept {
  if (!token.empty() && (token.front() == '%' || token.front() == '@'))
    token.remove_prefix(1);
  return token;
}

bool is_terminator_opcode(std::string_view opcode) noexcept {
  static constexpr std::array<std::string_view, 11> kTerminators = {
      "ret",    "br",          "switch",     "indirectbr",
      "invoke", "resume",      "unreachable", "cleanupret",
      "catchret", "catchswitch", "callbr"};
  for (auto t : kTerminators)
    if (t == opcode)
      return true;
  return false;
}

bool IrStatement::is_terminator() const noexcept {
  return is_terminator_opcode(opcode);
}

std::vector<std::pair<const Operand *, const Operand *>>
IrStatement::phi_incoming() const {
  std::vector<std::pair<const Operand *, const Operand *>> out;
  if (!is_phi())
    return out;
  const Operand *pending = nullptr;
  for (const auto &op : operands) {
    if (op.kind == OperandKind::LabelRef) {
      if (pending)
        out.emplace_back(pending, &op);
      pending = nullptr;
    } else {
      pending = &op;
    }
  }
  return out;
}

std::size_t IrFunction::statement_count() const noexcept {
  std::size_t n = 0;
  for (const auto &b : blocks)
    n += b.statements.size();
  return n;
}

const IrFunction *IrModule::find_function(std::string_view name) const noexcept {
  for (const auto &f : functions)
    if (f.name == name)
      return &f;
  return nullptr;
}

std::size_t IrModule::statement_count() const noexcept {
  std::size_t n = globals.size();
  for (const auto &f : functions)
    n += f.statement_count() + (f.is_declaration_only ? 0 : 1);
  return n;
}

std::string to_text(const IrModule &module) {
  std::ostringstream os;
  for (const auto &[name, layout] : module.named_types)
    os << '%' << name << " = type " << layout << '\n';
  for (const auto &g : module.globals)
    os << g.definition.raw_text << '\n';
  for (const auto &f : module.functions) {
    if (f.is_declaration_only) {
      os << f.header.raw_text << '\n';
      continue;
    }
    os << f.header.raw_text << '\n';
    for (const auto &b : f.blocks) {
      os << b.label << ":\n";
      for (const auto &s : b.statements)
        os << "  " << s.raw_text << '\n';
    }
    os << "}\n";
  }
  return os.str();
}

std::vector<std::string> duplicate_results(const IrFunction &function) {
  std::unordered_map<std::string, int> seen;
  std::vector<std::string> dups;
  for (const auto &p : function.params)
    ++seen[p];
  for (const auto &b : function.blocks)
    for (const auto &s : b.statements)
      if (s.result && ++seen[*s.result] == 2)
        dups.push_back(*s.result);
  return dups;
}

std::vector<std::string> validate(const IrModule &module) {
  std::vector<std::string> problems;
  std::set<std::string> fnames;
  for (const auto &f : module.functions) {
    if (!fnames.insert(f.name).second)
      problems.push_back("duplicate function @" + f.name);
    if (f.is_declaration_only)
      continue;
    if (f.blocks.empty())
      problems.push_back("function @" + f.name + " has no blocks");
    std::set<std::string> labels;
    for (const auto &b : f.blocks) {
      if (!labels.insert(b.label).second)
        problems.push_back("duplicate label " + b.label + " in @" + f.name);
      for (std::size_t i = 0; i + 1 < b.statements.size(); ++i)
        if (b.statements[i].is_terminator())
          problems.push_back("terminator before end of block " + b.label +
                             " in @" + f.name);
      for (const auto &s : b.statements)
        if (s.is_phi() && s.phi_incoming().empty())
          problems.push_back("phi without incoming pairs at line " +
                             std::to_string(s.line));
    }
    for (const auto &d : duplicate_results(f))
      problems.push_back("SSA violation: " + d + " assigned twice in @" +
                         f.name);
  }
  return problems;
}

} // namespace xflow
