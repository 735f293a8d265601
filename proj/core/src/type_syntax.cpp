//===- type_syntax.cpp - LLVM type expression recognizer -------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/syntax.hpp"

#include <array>
#include <cctype>

namespace xflow::syntax {
namespace {

bool is_int_type_word(std::string_view w) noexcept {
  if (w.size() < 2 || w[0] != 'i')
    return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(w[i])))
      return false;
  return true;
}

const Token *at(const std::vector<Token> &toks, std::size_t i) noexcept {
  return i < toks.size() ? &toks[i] : nullptr;
}

bool punct_at(const std::vector<Token> &toks, std::size_t i,
              std::string_view p) noexcept {
  const Token *t = at(toks, i);
  return t && t->punct(p);
}

bool word_at(const std::vector<Token> &toks, std::size_t i,
             std::string_view w) noexcept {
  const Token *t = at(toks, i);
  return t && t->word(w);
}

bool int_at(const std::vector<Token> &toks, std::size_t i) noexcept {
  const Token *t = at(toks, i);
  return t && t->kind == TokKind::Int && !t->placeholder;
}

std::size_t parse_type_impl(const std::vector<Token> &toks, std::size_t pos,
                            const NamedTypePredicate &is_named, int depth);

// Comma separated type list up to `close`; returns one past `close` or `pos`.
std::size_t parse_type_list(const std::vector<Token> &toks, std::size_t pos,
                            std::string_view close,
                            const NamedTypePredicate &is_named, int depth) {
  std::size_t p = pos;
  if (punct_at(toks, p, close))
    return p + 1;
  while (true) {
    std::size_t q = parse_type_impl(toks, p, is_named, depth + 1);
    if (q == p)
      return pos;
    p = q;
    if (punct_at(toks, p, ",")) {
      ++p;
      continue;
    }
    if (punct_at(toks, p, close))
      return p + 1;
    return pos;
  }
}

std::size_t parse_base(const std::vector<Token> &toks, std::size_t pos,
                       const NamedTypePredicate &is_named, int depth) {
  const Token *t = at(toks, pos);
  if (!t)
    return pos;
  switch (t->kind) {
  case TokKind::Word:
    if (is_primitive_type_word(t->text) || (t->placeholder))
      return pos + 1;
    return pos;
  case TokKind::LocalId:
    if (!t->placeholder && is_named && is_named(t->text))
      return pos + 1;
    return pos;
  case TokKind::Punct:
    break;
  default:
    return pos;
  }
  if (t->punct("{")) {
    std::size_t q = parse_type_list(toks, pos + 1, "}", is_named, depth);
    return q == pos + 1 ? pos : q;
  }
  if (t->punct("[")) {
    if (int_at(toks, pos + 1) && word_at(toks, pos + 2, "x")) {
      std::size_t q = parse_type_impl(toks, pos + 3, is_named, depth + 1);
      if (q > pos + 3 && punct_at(toks, q, "]"))
        return q + 1;
    }
    return pos;
  }
  if (t->punct("<")) {
    if (punct_at(toks, pos + 1, "{")) {
      std::size_t q = parse_type_list(toks, pos + 2, "}", is_named, depth);
      if (q > pos + 2 && punct_at(toks, q, ">"))
        return q + 1;
      return pos;
    }
    std::size_t p = pos + 1;
    if (word_at(toks, p, "vscale") && word_at(toks, p + 1, "x"))
      p += 2;
    if (int_at(toks, p) && word_at(toks, p + 1, "x")) {
      std::size_t q = parse_type_impl(toks, p + 2, is_named, depth + 1);
      if (q > p + 2 && punct_at(toks, q, ">"))
        return q + 1;
    }
    return pos;
  }
  return pos;
}

std::size_t parse_type_impl(const std::vector<Token> &toks, std::size_t pos,
                            const NamedTypePredicate &is_named, int depth) {
  // Nesting guard against pathological input.
  if (depth > 64)
    return pos;
  std::size_t p = parse_base(toks, pos, is_named, depth);
  if (p == pos)
    return pos;
  while (p < toks.size()) {
    if (punct_at(toks, p, "*")) {
      ++p;
      continue;
    }
    if (word_at(toks, p, "addrspace") && punct_at(toks, p + 1, "(") &&
        int_at(toks, p + 2) && punct_at(toks, p + 3, ")")) {
      p += 4;
      continue;
    }
    if (punct_at(toks, p, "(")) {
      // Function type: ( ) | ( ... ) | ( T, T [, ...] )
      std::size_t q = p + 1;
      bool ok = false;
      while (q < toks.size()) {
        if (punct_at(toks, q, ")")) {
          ok = true;
          break;
        }
        if (punct_at(toks, q, "...")) {
          ++q;
        } else {
          std::size_t r = parse_type_impl(toks, q, is_named, depth + 1);
          if (r == q)
            break;
          q = r;
        }
        if (punct_at(toks, q, ",")) {
          ++q;
          continue;
        }
        if (punct_at(toks, q, ")")) {
          ok = true;
          break;
        }
        break;
      }
      if (!ok)
        break;
      p = q + 1;
      continue;
    }
    break;
  }
  return p;
}

} // namespace

bool is_primitive_type_word(std::string_view w) noexcept {
  static constexpr std::array<std::string_view, 15> kWords = {
      "void",     "half",   "bfloat",   "float",  "double",
      "x86_fp80", "fp128",  "ppc_fp128", "label", "metadata",
      "x86_mmx",  "x86_amx", "token",   "ptr",    "opaque"};
  for (auto k : kWords)
    if (k == w)
      return true;
  return is_int_type_word(w);
}

bool looks_like_named_type(std::string_view tok) noexcept {
  std::string_view name = identifier_name(tok);
  if (!name.empty() && name.front() == '"')
    name.remove_prefix(1);
  return name.starts_with("struct.") || name.starts_with("class.") ||
         name.starts_with("union.");
}

std::size_t parse_type(const std::vector<Token> &toks, std::size_t pos,
                       const NamedTypePredicate &is_named) {
  return parse_type_impl(toks, pos, is_named, 0);
}

} // namespace xflow::syntax
