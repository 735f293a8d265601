//===- xflow/normalizer.hpp - Statement normalization -----------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Raw statements become vocabulary strings: identifiers turn into <%ID> and
// <@ID>, literal operands into <INT>/<FLOAT>/<STRING> (the literals are kept
// on the side), and named struct types are replaced by their layouts.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/ir.hpp"

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xflow {

using NamedTypeMap = std::map<std::string, std::string>;

enum class ImmKind { Int, Float, String };

std::string_view to_string(ImmKind kind) noexcept;

struct Immediate {
  ImmKind kind = ImmKind::Int;
  std::string literal;

  friend bool operator==(const Immediate &, const Immediate &) = default;
};

struct NormalizedStmt {
  std::string text;
  std::vector<Immediate> immediates;
  /// Statement this was produced from; not owned.
  const IrStatement *origin = nullptr;
};

/// `text<TAB>imm1,imm2,...`
std::string serialize(const NormalizedStmt &stmt);

/// Expand named types inside layouts until none remain. A type reached again
/// while it is being expanded more than `depth_limit` times is replaced by
/// `<RECURSIVE>`; references to names missing from the map become
/// `<UNRESOLVED:name>`.
NamedTypeMap inline_types(const NamedTypeMap &layouts,
                          std::vector<std::string> *warnings = nullptr,
                          int depth_limit = 1);

/// `types` should already be inlined. Unknown struct names are kept as
/// `<UNRESOLVED:name>` and reported through `warnings`.
NormalizedStmt normalize(const IrStatement &stmt, const NamedTypeMap &types,
                         std::vector<std::string> *warnings = nullptr);

/// Normalizes a raw statement line, mainly for tests and tools.
NormalizedStmt normalize_text(std::string_view statement,
                              const NamedTypeMap &types = {});

/// Normalized form of every statement of a module, in textual order: global
/// definitions first, then each function's header followed by its body.
/// Holds pointers into `module`, which must outlive it.
class NormalizedModule {
public:
  explicit NormalizedModule(const IrModule &module);

  const NormalizedStmt *find(const IrStatement &stmt) const;
  /// Throws Error(InvalidArgument) for statements of another module.
  const NormalizedStmt &at(const IrStatement &stmt) const;

  const std::vector<NormalizedStmt> &statements() const noexcept {
    return stmts_;
  }
  const NamedTypeMap &inlined_types() const noexcept { return types_; }
  const std::vector<std::string> &warnings() const noexcept {
    return warnings_;
  }

private:
  NamedTypeMap types_;
  std::vector<NormalizedStmt> stmts_;
  std::unordered_map<const IrStatement *, std::size_t> index_;
  std::vector<std::string> warnings_;
};

} // namespace xflow
