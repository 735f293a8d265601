//===- xflow/syntax.hpp - Token-level LLVM IR statement syntax --*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Shared by the parser, the normalizer and the categorizer. A statement line
// is lexed into tokens, type expressions are recognized with a small
// backtracking parser, and every token is assigned a role. Normalized
// statements (`<%ID> = add i16 <%ID>, <INT>`) lex with the same rules: the
// placeholders are tokens of their own.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/ir.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xflow::syntax {

enum class TokKind {
  LocalId,   // %x, %"q", %7, <%ID>
  GlobalId,  // @x, @"q", <@ID>
  Int,       // 42, -1, <INT>
  Float,     // 1.5e+00, 0x3FF0000000000000, <FLOAT>
  String,    // "..", c"..", <STRING>
  Word,      // keywords, primitive types, markers such as <RECURSIVE>
  Punct,     // = , ( ) [ ] { } < > * ...
  Metadata,  // !dbg, !12, !{...}
  AttrRef,   // #0
};

struct Token {
  TokKind kind;
  std::string_view text;
  std::size_t begin = 0;
  bool placeholder = false;

  std::size_t end() const noexcept { return begin + text.size(); }
  bool is(TokKind k, std::string_view t) const noexcept {
    return kind == k && text == t;
  }
  bool punct(std::string_view t) const noexcept { return is(TokKind::Punct, t); }
  bool word(std::string_view t) const noexcept { return is(TokKind::Word, t); }
};

/// Lex one logical line. Never fails: unrecognized bytes become single
/// character punctuation tokens.
std::vector<Token> lex(std::string_view line);

/// Remove a trailing `; comment` (quote aware).
std::string_view strip_comment(std::string_view line) noexcept;

/// Remove metadata attachments (`, !dbg !7`, `!tbaa !3`) from a statement.
std::string strip_metadata_attachments(std::string_view line);

/// Net bracket depth change of a line across ( [ { ignoring quoted text.
int bracket_balance(std::string_view line) noexcept;

/// Predicate deciding whether a `%name` token names a struct type.
using NamedTypePredicate = std::function<bool(std::string_view)>;

/// Default predicate: struct./class./union. prefixes, which is how clang
/// and flang name aggregate types.
bool looks_like_named_type(std::string_view local_token) noexcept;

bool is_primitive_type_word(std::string_view word) noexcept;

/// Parse one type expression starting at `pos`. Returns the index one past
/// its last token, or `pos` when no type starts there.
std::size_t parse_type(const std::vector<Token> &toks, std::size_t pos,
                       const NamedTypePredicate &is_named);

enum class Role {
  Verbatim,
  TypeToken,  // token belongs to a type expression
  NamedType,  // %struct.x inside a type expression
  Local,      // SSA value
  Label,      // block label reference
  Global,     // global variable or function symbol
  ImmInt,
  ImmFloat,
  ImmString,
  Keyword,    // null, undef, true, ...
  AttrRef,    // #N
};

struct TypeSpan {
  std::size_t first = 0; // token index
  std::size_t last = 0;  // one past
  std::string text;
};

/// Role assignment for one statement line.
struct StatementScan {
  std::vector<Token> tokens;
  std::vector<Role> roles;
  std::vector<TypeSpan> types;
  /// Token index of the result identifier, if any.
  std::optional<std::size_t> result_token;
  /// Token index of the opcode word (`call` for `tail call`).
  std::optional<std::size_t> opcode_token;
  std::string opcode;
  /// Top-level operands; constant expressions collapse to one operand.
  std::vector<Operand> operands;
  std::optional<std::size_t> callee;
  /// For `define`/`declare` lines: symbol name and one entry per declared
  /// parameter holding the token index of its name, if it has one.
  std::optional<std::size_t> function_name_token;
  std::vector<std::optional<std::size_t>> params;
  /// Token index of the `)` closing a define/declare parameter list.
  std::optional<std::size_t> param_list_close;
};

StatementScan scan_statement(std::string_view text,
                             const NamedTypePredicate &is_named);

/// Text of tokens [first, last) of `source` exactly as written.
std::string_view token_range_text(std::string_view source,
                                  const std::vector<Token> &toks,
                                  std::size_t first, std::size_t last) noexcept;

} // namespace xflow::syntax
