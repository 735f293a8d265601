//===- xflow/category.hpp - Statement categories ----------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/normalizer.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace xflow {

/// Coarse statement classes used to label embeddings for clustering and as
/// the resource proxy of the distance tests. Most are driven by the type an
/// operation produces or manipulates.
enum class StatementCategory {
  VecIntPtr,          // <d x int>* operation
  VecInt,             // <d x int> operation
  VecStructPtr,       // <d x struct/class*> operation
  StructPtr,          // struct/class* operation
  Struct,             // struct/class operation
  IntPtrPtr,          // int** operation
  IntPtr,             // int* operation
  Int,                // int operation
  Conversion,         // type conversion operation
  GlobalDefinition,   // global variable definition
  VecIntPtrElems,     // <d x int*> operation
  LoadFunctionPtr,    // load function pointer
  StoreFunctionPtr,   // store function pointer
  FloatPtrPtr,        // floating point** operation
  FloatPtr,           // floating point* operation
  Float,              // floating point operation
  CallVoid,           // call void
  Other,              // other/misc.
  ArrayOfArray,       // [d x [d x type]] operation
  ArrayOfStruct,      // [d x struct/class] operation
  ArrayOfInt,         // [d x int] operation
  ArrayOfFloat,       // [d x floating point] operation
  VecFloatPtr,        // <d x floating point>* operation
  VecFloat,           // <d x floating point> operation
  VoidFunctionDef,    // void function definition
  InvokeVoid,         // invoke void
};

inline constexpr std::size_t kCategoryCount = 26;

/// Display name, e.g. "<d x int> operation".
std::string_view to_string(StatementCategory c) noexcept;
std::optional<StatementCategory> category_from_string(std::string_view name);

const std::array<StatementCategory, kCategoryCount> &all_categories() noexcept;

/// Total: anything unrecognized is Other.
StatementCategory categorize(std::string_view normalized_text);

inline StatementCategory categorize(const NormalizedStmt &stmt) {
  return categorize(stmt.text);
}

} // namespace xflow
