//===- category.cpp - Statement categories ---------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/category.hpp"

#include "xflow/syntax.hpp"

#include <algorithm>
#include <memory>

namespace xflow {
namespace {

using syntax::TokKind;
using syntax::Token;

constexpr std::array<std::string_view, kCategoryCount> kNames = {
    "<d x int>* operation",
    "<d x int> operation",
    "<d x struct/class*> operation",
    "struct/class* operation",
    "struct/class operation",
    "int** operation",
    "int* operation",
    "int operation",
    "type conversion operation",
    "global variable definition",
    "<d x int*> operation",
    "load function pointer",
    "store function pointer",
    "floating point** operation",
    "floating point* operation",
    "floating point operation",
    "call void",
    "other/misc.",
    "[d x [d x type]] operation",
    "[d x struct/class] operation",
    "[d x int] operation",
    "[d x floating point] operation",
    "<d x floating point>* operation",
    "<d x floating point> operation",
    "void function definition",
    "invoke void",
};

constexpr std::array<std::string_view, 13> kConversions = {
    "trunc",  "zext",   "sext",    "fptrunc",  "fpext",
    "fptoui", "fptosi", "uitofp",  "sitofp",   "ptrtoint",
    "inttoptr", "bitcast", "addrspacecast"};

constexpr std::array<std::string_view, 13> kControlOnly = {
    "br",      "switch",     "indirectbr", "unreachable", "resume",
    "cleanup", "catch",      "filter",     "fence",       "cleanupret",
    "catchret", "catchswitch", "callbr"};

constexpr std::array<std::string_view, 7> kFloatWords = {
    "half", "bfloat", "float", "double", "x86_fp80", "fp128", "ppc_fp128"};

template <std::size_t N>
bool one_of(std::string_view w, const std::array<std::string_view, N> &set) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

struct Shape {
  enum Base { Int, Float, Struct, Vector, Array, Function, Void, Other };
  Base base = Other;
  int ptr = 0;
  std::shared_ptr<Shape> elem; // vector/array element, function return
};

bool is_int_word(std::string_view w) {
  return w.size() >= 2 && w[0] == 'i' &&
         std::all_of(w.begin() + 1, w.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

Shape classify(const std::vector<Token> &t, std::size_t first,
               std::size_t last, int depth = 0) {
  Shape s;
  if (depth > 64)
    return s;
  while (last > first) {
    if (t[last - 1].punct("*")) {
      ++s.ptr;
      --last;
    } else if (last - first >= 4 && t[last - 1].punct(")") &&
               t[last - 3].punct("(") && t[last - 4].word("addrspace")) {
      last -= 4;
    } else {
      break;
    }
  }
  if (last <= first)
    return s;
  if (t[last - 1].punct(")")) {
    int d = 0;
    std::size_t k = last;
    while (k > first) {
      --k;
      if (t[k].punct(")"))
        ++d;
      else if (t[k].punct("(") && --d == 0)
        break;
    }
    if (k > first) {
      s.base = Shape::Function;
      s.elem = std::make_shared<Shape>(classify(t, first, k, depth + 1));
    }
    return s;
  }
  const Token &h = t[first];
  if (h.punct("[")) {
    if (last - first >= 5 && t[first + 2].word("x")) {
      s.base = Shape::Array;
      s.elem =
          std::make_shared<Shape>(classify(t, first + 3, last - 1, depth + 1));
    }
    return s;
  }
  if (h.punct("<")) {
    if (first + 1 < last && t[first + 1].punct("{")) {
      s.base = Shape::Struct;
      return s;
    }
    std::size_t p = first + 1;
    if (p + 1 < last && t[p].word("vscale") && t[p + 1].word("x"))
      p += 2;
    if (p + 2 < last && t[p + 1].word("x")) {
      s.base = Shape::Vector;
      s.elem = std::make_shared<Shape>(classify(t, p + 2, last - 1, depth + 1));
    }
    return s;
  }
  if (h.punct("{") || h.kind == TokKind::LocalId) {
    s.base = Shape::Struct;
    return s;
  }
  if (h.kind == TokKind::Word) {
    if (is_int_word(h.text))
      s.base = Shape::Int;
    else if (one_of(h.text, kFloatWords))
      s.base = Shape::Float;
    else if (h.text == "void")
      s.base = Shape::Void;
    else if (h.text == "ptr") {
      // Opaque pointers carry no pointee; count them as byte pointers.
      s.base = Shape::Int;
      ++s.ptr;
    } else if (h.text == "opaque" || h.placeholder)
      s.base = Shape::Struct;
  }
  return s;
}

bool mentions_function_type(const std::vector<Token> &t, std::size_t first,
                            std::size_t last) {
  for (std::size_t k = first; k < last; ++k)
    if (t[k].punct("(") && !(k > first && t[k - 1].word("addrspace")))
      return true;
  return false;
}

StatementCategory from_shape(const Shape &s) {
  using C = StatementCategory;
  switch (s.base) {
  case Shape::Int:
    return s.ptr == 0 ? C::Int : s.ptr == 1 ? C::IntPtr : C::IntPtrPtr;
  case Shape::Float:
    return s.ptr == 0 ? C::Float : s.ptr == 1 ? C::FloatPtr : C::FloatPtrPtr;
  case Shape::Struct:
    return s.ptr == 0 ? C::Struct : C::StructPtr;
  case Shape::Vector: {
    const Shape &e = *s.elem;
    if (e.ptr > 0)
      return e.base == Shape::Struct ? C::VecStructPtr : C::VecIntPtrElems;
    if (e.base == Shape::Int)
      return s.ptr ? C::VecIntPtr : C::VecInt;
    if (e.base == Shape::Float)
      return s.ptr ? C::VecFloatPtr : C::VecFloat;
    return C::Other;
  }
  case Shape::Array:
    switch (s.elem->base) {
    case Shape::Array:
      return C::ArrayOfArray;
    case Shape::Struct:
      return C::ArrayOfStruct;
    case Shape::Int:
      return C::ArrayOfInt;
    case Shape::Float:
      return C::ArrayOfFloat;
    default:
      return C::Other;
    }
  default:
    return C::Other;
  }
}

} // namespace

std::string_view to_string(StatementCategory c) noexcept {
  return kNames[static_cast<std::size_t>(c)];
}

std::optional<StatementCategory> category_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name)
      return static_cast<StatementCategory>(i);
  return std::nullopt;
}

const std::array<StatementCategory, kCategoryCount> &all_categories() noexcept {
  static const auto all = [] {
    std::array<StatementCategory, kCategoryCount> a{};
    for (std::size_t i = 0; i < a.size(); ++i)
      a[i] = static_cast<StatementCategory>(i);
    return a;
  }();
  return all;
}

StatementCategory categorize(std::string_view text) {
  using C = StatementCategory;
  auto sc = syntax::scan_statement(text, syntax::looks_like_named_type);
  const std::string &op = sc.opcode;
  if (op.empty() || one_of(op, kControlOnly))
    return C::Other;
  if (one_of(op, kConversions))
    return C::Conversion;
  if (op == "global" || op == "constant")
    return C::GlobalDefinition;
  if (sc.types.empty())
    return C::Other;

  const auto &t = sc.tokens;
  const auto &span0 = sc.types.front();
  if (op == "define" || op == "declare") {
    Shape r = classify(t, span0.first, span0.last);
    return r.base == Shape::Void && r.ptr == 0 ? C::VoidFunctionDef
                                               : from_shape(r);
  }
  if (op == "call" || op == "invoke") {
    Shape r = classify(t, span0.first, span0.last);
    if (r.base == Shape::Function && r.ptr == 0)
      r = *r.elem;
    if (r.base == Shape::Void && r.ptr == 0)
      return op == "call" ? C::CallVoid : C::InvokeVoid;
    return from_shape(r);
  }
  if (op == "store" || op == "load") {
    if (mentions_function_type(t, span0.first, span0.last))
      return op == "store" ? C::StoreFunctionPtr : C::LoadFunctionPtr;
    return from_shape(classify(t, span0.first, span0.last));
  }
  const auto &span = (op == "select" && sc.types.size() > 1) ? sc.types[1]
                                                             : span0;
  return from_shape(classify(t, span.first, span.last));
}

} // namespace xflow
