//===- statement_scan.cpp - Token roles for one IR statement ---------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/syntax.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace xflow::syntax {
namespace {

template <std::size_t N>
bool one_of(std::string_view w, const std::array<std::string_view, N> &set) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

constexpr std::array<std::string_view, 7> kKeywordConstants = {
    "null", "undef", "poison", "true", "false", "zeroinitializer", "none"};

constexpr std::array<std::string_view, 42> kConstExprOps = {
    "getelementptr", "bitcast",       "ptrtoint",      "inttoptr",
    "addrspacecast", "trunc",         "zext",          "sext",
    "fptrunc",       "fpext",         "fptoui",        "fptosi",
    "uitofp",        "sitofp",        "icmp",          "fcmp",
    "select",        "extractelement", "insertelement", "shufflevector",
    "extractvalue",  "insertvalue",   "add",           "sub",
    "mul",           "shl",           "lshr",          "ashr",
    "and",           "or",            "xor",           "udiv",
    "sdiv",          "urem",          "srem",          "fadd",
    "fsub",          "fmul",          "fdiv",          "frem",
    "blockaddress",  "dso_local_equivalent"};

constexpr std::array<std::string_view, 25> kConstExprModifiers = {
    "inbounds", "nuw", "nsw", "exact", "inrange", "eq",  "ne",
    "ugt",      "uge", "ult", "ule",   "sgt",     "sge", "slt",
    "sle",      "oeq", "ogt", "oge",   "olt",     "ole", "one",
    "ord",      "ueq", "une", "uno"};

// Attributes whose parenthesized argument is a plain number.
constexpr std::array<std::string_view, 8> kNumericAttrs = {
    "align",          "alignstack",  "addrspace",
    "dereferenceable", "dereferenceable_or_null", "allocsize",
    "vscale_range",   "nofpclass"};

// Words after which a bare number is an attribute value, not an immediate.
constexpr std::array<std::string_view, 5> kNumberPrefixWords = {
    "align", "alignstack", "cc", "addrspace", "vscale"};

constexpr std::array<std::string_view, 5> kStringPrefixWords = {
    "section", "partition", "gc", "comdat", "syncscope"};

constexpr std::array<std::string_view, 4> kGlobalKinds = {
    "global", "constant", "alias", "ifunc"};

bool is_call_like(std::string_view op) noexcept {
  return op == "call" || op == "invoke" || op == "callbr";
}

class Scanner {
public:
  Scanner(std::string_view text, const NamedTypePredicate &is_named)
      : text_(text), is_named_(is_named) {}

  StatementScan run() {
    sc_.tokens = lex(text_);
    n_ = sc_.tokens.size();
    sc_.roles.assign(n_, Role::Verbatim);
    std::size_t i = 0;
    const auto &t = sc_.tokens;
    if (n_ >= 2 &&
        (t[0].kind == TokKind::LocalId || t[0].kind == TokKind::GlobalId) &&
        t[1].punct("=")) {
      sc_.result_token = 0;
      sc_.roles[0] =
          t[0].kind == TokKind::LocalId ? Role::Local : Role::Global;
      i = 2;
    }
    find_opcode(i);
    walk(i, n_, true);
    return std::move(sc_);
  }

private:
  const Token &tok(std::size_t i) const { return sc_.tokens[i]; }
  bool punct_at(std::size_t i, std::string_view p) const {
    return i < n_ && tok(i).punct(p);
  }

  void find_opcode(std::size_t i) {
    const auto &t = sc_.tokens;
    if (sc_.result_token && t[0].kind == TokKind::GlobalId) {
      for (std::size_t j = i; j < n_ && t[j].kind == TokKind::Word; ++j) {
        if (one_of(t[j].text, kGlobalKinds)) {
          sc_.opcode_token = j;
          break;
        }
      }
    } else {
      std::size_t j = i;
      while (j < n_ && (t[j].word("tail") || t[j].word("musttail") ||
                        t[j].word("notail")))
        ++j;
      if (j < n_ && t[j].kind == TokKind::Word)
        sc_.opcode_token = j;
    }
    if (sc_.opcode_token)
      sc_.opcode = std::string(t[*sc_.opcode_token].text);
  }

  // Index of the bracket closing the one at `open`, or n_ when unbalanced.
  std::size_t matching(std::size_t open) const {
    int depth = 0;
    for (std::size_t k = open; k < n_; ++k) {
      const auto &t = tok(k);
      if (t.kind != TokKind::Punct)
        continue;
      if (t.text == "(" || t.text == "[" || t.text == "{")
        ++depth;
      else if ((t.text == ")" || t.text == "]" || t.text == "}") &&
               --depth == 0)
        return k;
    }
    return n_;
  }

  void mark_type(std::size_t first, std::size_t last) {
    for (std::size_t k = first; k < last; ++k)
      sc_.roles[k] =
          (tok(k).kind == TokKind::LocalId && !tok(k).placeholder)
              ? Role::NamedType
              : Role::TypeToken;
    sc_.types.push_back(
        TypeSpan{first, last,
                 std::string(token_range_text(text_, sc_.tokens, first, last))});
  }

  bool number_is_verbatim(std::size_t i) const {
    if (i == 0)
      return false;
    const auto &prev = tok(i - 1);
    return prev.kind == TokKind::Word && one_of(prev.text, kNumberPrefixWords);
  }

  bool string_is_verbatim(std::size_t i) const {
    if (tok(i).placeholder)
      return false;
    if (i > 0 && tok(i - 1).kind == TokKind::Word &&
        one_of(tok(i - 1).text, kStringPrefixWords))
      return true;
    if (i > 1 && tok(i - 1).punct("(") && tok(i - 2).kind == TokKind::Word &&
        one_of(tok(i - 2).text, kStringPrefixWords))
      return true;
    // "key"="value" string attributes.
    if (punct_at(i + 1, "="))
      return true;
    if (i > 1 && tok(i - 1).punct("=") && tok(i - 2).kind == TokKind::String)
      return true;
    return false;
  }

  void add_operand(bool top, OperandKind kind, std::size_t first,
                   std::size_t last) {
    if (!top)
      return;
    sc_.operands.push_back(Operand{
        kind, std::string(token_range_text(text_, sc_.tokens, first, last))});
    last_operand_token_ = last - 1;
  }

  void walk_params(std::size_t open, std::size_t close) {
    sc_.function_name_token = open - 1;
    sc_.param_list_close = close;
    std::size_t entry_begin = open + 1;
    auto finish_entry = [&](std::size_t b, std::size_t e) {
      if (b >= e)
        return;
      if (e == b + 1 && tok(b).punct("..."))
        return;
      std::optional<std::size_t> name;
      std::size_t j = b;
      while (j < e) {
        std::size_t q = parse_type(sc_.tokens, j, is_named_);
        if (q > j && q <= e) {
          mark_type(j, q);
          j = q;
          continue;
        }
        if (tok(j).kind == TokKind::LocalId) {
          name = j;
          sc_.roles[j] = Role::Local;
        } else if (tok(j).kind == TokKind::AttrRef) {
          sc_.roles[j] = Role::AttrRef;
        }
        ++j;
      }
      sc_.params.push_back(name);
    };
    int depth = 0;
    for (std::size_t k = open + 1; k < close; ++k) {
      const auto &t = tok(k);
      if (t.kind == TokKind::Punct) {
        if (t.text == "(" || t.text == "[" || t.text == "{")
          ++depth;
        else if (t.text == ")" || t.text == "]" || t.text == "}")
          --depth;
        else if (t.text == "," && depth == 0) {
          finish_entry(entry_begin, k);
          entry_begin = k + 1;
        }
      }
    }
    finish_entry(entry_begin, close);
  }

  void walk(std::size_t begin, std::size_t end, bool top) {
    const bool header = sc_.opcode == "define" || sc_.opcode == "declare";
    const bool phi = sc_.opcode == "phi";
    bool label_type = false;
    std::size_t i = begin;
    while (i < end) {
      if (sc_.opcode_token && i == *sc_.opcode_token) {
        ++i;
        continue;
      }
      std::size_t q = parse_type(sc_.tokens, i, is_named_);
      if (q > i && q <= end) {
        mark_type(i, q);
        label_type = (q == i + 1 && tok(i).word("label"));
        i = q;
        continue;
      }
      const bool after_label = std::exchange(label_type, false);
      const Token &t = tok(i);
      switch (t.kind) {
      case TokKind::LocalId: {
        bool is_label = after_label || (top && phi && in_phi_bracket_ &&
                                        phi_slot_ == 1);
        sc_.roles[i] = is_label ? Role::Label : Role::Local;
        add_operand(top,
                    is_label ? OperandKind::LabelRef : OperandKind::LocalId, i,
                    i + 1);
        break;
      }
      case TokKind::GlobalId:
        if (header && top && !sc_.function_name_token && punct_at(i + 1, "(")) {
          sc_.roles[i] = Role::Global;
          std::size_t close = matching(i + 1);
          walk_params(i + 1, std::min(close, n_));
          i = close < n_ ? close + 1 : n_;
          continue;
        }
        sc_.roles[i] = Role::Global;
        add_operand(top, OperandKind::GlobalId, i, i + 1);
        break;
      case TokKind::Int:
      case TokKind::Float:
        if (!t.placeholder && number_is_verbatim(i))
          break;
        sc_.roles[i] = t.kind == TokKind::Int ? Role::ImmInt : Role::ImmFloat;
        add_operand(top,
                    t.kind == TokKind::Int ? OperandKind::ImmInt
                                           : OperandKind::ImmFloat,
                    i, i + 1);
        break;
      case TokKind::String:
        if (string_is_verbatim(i))
          break;
        sc_.roles[i] = Role::ImmString;
        add_operand(top, OperandKind::ImmString, i, i + 1);
        break;
      case TokKind::Word: {
        if (t.placeholder)
          break;
        if (one_of(t.text, kKeywordConstants)) {
          sc_.roles[i] = Role::Keyword;
          add_operand(top, OperandKind::UndefNull, i, i + 1);
          break;
        }
        if (one_of(t.text, kNumericAttrs) && punct_at(i + 1, "(")) {
          std::size_t close = matching(i + 1);
          i = close < n_ ? close + 1 : n_;
          continue;
        }
        if (one_of(t.text, kConstExprOps)) {
          std::size_t j = i + 1;
          while (j < end && tok(j).kind == TokKind::Word &&
                 one_of(tok(j).text, kConstExprModifiers))
            ++j;
          if (punct_at(j, "(")) {
            std::size_t close = matching(j);
            std::size_t stop = std::min(close, end);
            walk(j + 1, stop, false);
            std::size_t last = close < n_ ? close + 1 : n_;
            add_operand(top, OperandKind::ConstantExpr, i, last);
            i = last;
            continue;
          }
        }
        break;
      }
      case TokKind::AttrRef:
        sc_.roles[i] = Role::AttrRef;
        break;
      case TokKind::Metadata:
        break;
      case TokKind::Punct:
        if (top && phi) {
          if (t.text == "[") {
            in_phi_bracket_ = true;
            phi_slot_ = 0;
          } else if (t.text == "," && in_phi_bracket_) {
            ++phi_slot_;
          } else if (t.text == "]") {
            in_phi_bracket_ = false;
          }
        }
        if (top && t.text == "(" && is_call_like(sc_.opcode) && !sc_.callee &&
            !sc_.operands.empty() && last_operand_token_ + 1 == i) {
          auto k = sc_.operands.back().kind;
          if (k == OperandKind::LocalId || k == OperandKind::GlobalId ||
              k == OperandKind::ConstantExpr)
            sc_.callee = sc_.operands.size() - 1;
        }
        break;
      }
      ++i;
    }
  }

  std::string_view text_;
  const NamedTypePredicate &is_named_;
  StatementScan sc_;
  std::size_t n_ = 0;
  std::size_t last_operand_token_ = static_cast<std::size_t>(-2);
  bool in_phi_bracket_ = false;
  int phi_slot_ = 0;
};

} // namespace

StatementScan scan_statement(std::string_view text,
                             const NamedTypePredicate &is_named) {
  return Scanner(text, is_named).run();
}

} // namespace xflow::syntax
