//===- xflow/ir.hpp - In-memory LLVM IR model -------------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A deliberately small model of textual LLVM IR: enough structure to build
// contextual flow graphs and to normalize statements, nothing more. Modules
// are produced by the parser and are immutable afterwards.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xflow {

enum class OperandKind {
  LocalId,
  GlobalId,
  LabelRef,
  ImmInt,
  ImmFloat,
  ImmString,
  FunctionRef,
  UndefNull,
  ConstantExpr,
};

std::string_view to_string(OperandKind kind) noexcept;

struct Operand {
  OperandKind kind;
  /// Token text as written, sigil included (`%x`, `@g`, `7`, `c"hi\00"`).
  std::string text;

  friend bool operator==(const Operand &, const Operand &) = default;
};

/// Identifier name without its `%`/`@` sigil.
std::string_view identifier_name(std::string_view token) noexcept;

struct IrStatement {
  /// Source text after comment and metadata-attachment stripping, trimmed.
  std::string raw_text;
  std::string opcode;
  std::optional<std::string> result;
  std::vector<Operand> operands;
  std::vector<std::string> type_tokens;
  int line = 0;
  /// Index into `operands` of the callee for call-like statements.
  std::optional<std::size_t> callee;

  bool is_terminator() const noexcept;
  bool is_phi() const noexcept { return opcode == "phi"; }

  /// Incoming (value operand, predecessor label) pairs of a phi.
  std::vector<std::pair<const Operand *, const Operand *>> phi_incoming() const;

  friend bool operator==(const IrStatement &, const IrStatement &) = default;
};

bool is_terminator_opcode(std::string_view opcode) noexcept;

struct IrBasicBlock {
  std::string label;
  std::vector<IrStatement> statements;

  friend bool operator==(const IrBasicBlock &, const IrBasicBlock &) = default;
};

struct IrFunction {
  std::string name;
  std::vector<std::string> params;
  std::vector<IrBasicBlock> blocks;
  bool is_declaration_only = false;
  /// The `define`/`declare` line itself, normalizable like any statement.
  IrStatement header;

  std::size_t statement_count() const noexcept;

  friend bool operator==(const IrFunction &, const IrFunction &) = default;
};

struct IrGlobal {
  std::string name;
  IrStatement definition;

  friend bool operator==(const IrGlobal &, const IrGlobal &) = default;
};

struct IrModule {
  std::vector<IrFunction> functions;
  std::vector<IrGlobal> globals;
  /// Named struct name (without `%`) to its literal layout text.
  std::map<std::string, std::string> named_types;
  /// Named types referenced by statements but never defined.
  std::vector<std::string> unresolved_types;
  std::string source_path;

  const IrFunction *find_function(std::string_view name) const noexcept;
  std::size_t statement_count() const noexcept;

  friend bool operator==(const IrModule &, const IrModule &) = default;
};

/// Re-emit the module as line-oriented IR text. Every statement is written
/// as its raw_text, so reparsing yields the same statements.
std::string to_text(const IrModule &module);

/// Result identifiers that occur more than once in a function.
std::vector<std::string> duplicate_results(const IrFunction &function);

/// Checks the structural invariants listed on the model types; returns a
/// human-readable description of each violation.
std::vector<std::string> validate(const IrModule &module);

} // namespace xflow
