//===- xflow/parser.hpp - LLVM IR assembly parser ---------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/ir.hpp"
#include "xflow/syntax.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xflow {

struct Diagnostic {
  int line = 0;
  std::string message;

  friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
};

struct ParseDiagnostics {
  std::vector<Diagnostic> warnings;
  std::size_t skipped_lines = 0;
  /// Set iff no module was produced.
  std::optional<Diagnostic> fatal;

  void warn(int line, std::string message) {
    warnings.push_back(Diagnostic{line, std::move(message)});
  }

  /// Line-delimited `level<TAB>line<TAB>message` records.
  std::string serialize() const;

  friend bool operator==(const ParseDiagnostics &,
                         const ParseDiagnostics &) = default;
};

struct ParseResult {
  std::optional<IrModule> module;
  ParseDiagnostics diagnostics;
};

/// Parse `.ll` text. Never throws on malformed input: failures are reported
/// through `diagnostics.fatal`.
ParseResult parse_module(std::string_view source, std::string source_path = {});

/// Reads and parses a file; throws Error(Io) or Error(FatalSyntax).
IrModule read_module(const std::filesystem::path &path,
                     ParseDiagnostics *diagnostics = nullptr);

struct SourceLine {
  int line = 0;
  std::string text;
};

/// Turns one body line into a statement; nullopt drops the line.
using StatementBuilder =
    std::function<std::optional<IrStatement>(const SourceLine &)>;

/// Parse a single statement line with the default named-type heuristic.
IrStatement parse_statement(std::string_view text, int line = 0);

/// `name:` label lines. Quoted names keep their quotes, matching how
/// `%"name"` references resolve.
std::optional<std::string> label_of(std::string_view line);

/// Partition a function body into basic blocks. A block starts at every
/// label and after every terminator; unlabeled starts get a minted label and
/// an ImplicitBlock warning, except the entry block which takes
/// `entry_label`.
std::vector<IrBasicBlock> split_blocks(std::span<const SourceLine> body,
                                       ParseDiagnostics &diagnostics,
                                       std::string_view entry_label = "0",
                                       const StatementBuilder &build = {});

} // namespace xflow
