//===- lexer.cpp - LLVM IR line lexer --------------------------------------===//
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

bool is_ident_char(char c) noexcept {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == '$' || c == '.' || c == '_';
}

bool is_word_start(char c) noexcept {
  auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || c == '.' || c == '$';
}

bool is_word_char(char c) noexcept {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '.' || c == '$';
}

bool is_digit(char c) noexcept {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

bool is_hex(char c) noexcept {
  return std::isxdigit(static_cast<unsigned char>(c)) != 0;
}

// Index one past the closing quote of a string starting at `pos` (which
// holds the opening quote). Unterminated strings run to end of line.
std::size_t skip_string(std::string_view s, std::size_t pos) noexcept {
  std::size_t i = pos + 1;
  while (i < s.size() && s[i] != '"')
    ++i;
  return i < s.size() ? i + 1 : s.size();
}

// Index one past the bracket matching s[pos].
std::size_t skip_balanced(std::string_view s, std::size_t pos, char open,
                          char close) noexcept {
  int depth = 0;
  std::size_t i = pos;
  while (i < s.size()) {
    char c = s[i];
    if (c == '"') {
      i = skip_string(s, i);
      continue;
    }
    if (c == open)
      ++depth;
    else if (c == close && --depth == 0)
      return i + 1;
    ++i;
  }
  return s.size();
}

struct PlaceholderSpelling {
  std::string_view text;
  TokKind kind;
};

constexpr std::array<PlaceholderSpelling, 6> kPlaceholders = {{
    {"<%ID>", TokKind::LocalId},
    {"<@ID>", TokKind::GlobalId},
    {"<INT>", TokKind::Int},
    {"<FLOAT>", TokKind::Float},
    {"<STRING>", TokKind::String},
    {"<RECURSIVE>", TokKind::Word},
}};

constexpr std::string_view kUnresolvedPrefix = "<UNRESOLVED:";

} // namespace

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](TokKind k, std::size_t b, std::size_t e, bool ph = false) {
    out.push_back(Token{k, s.substr(b, e - b), b, ph});
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    if (c == '%' || c == '@') {
      TokKind k = c == '%' ? TokKind::LocalId : TokKind::GlobalId;
      ++i;
      if (i < s.size() && s[i] == '"') {
        i = skip_string(s, i);
      } else {
        while (i < s.size() && is_ident_char(s[i]))
          ++i;
      }
      push(k, b, i);
      continue;
    }
    if (c == '<') {
      bool matched = false;
      for (const auto &ph : kPlaceholders) {
        if (s.substr(i, ph.text.size()) == ph.text) {
          i += ph.text.size();
          push(ph.kind, b, i, true);
          matched = true;
          break;
        }
      }
      if (matched)
        continue;
      if (s.substr(i, kUnresolvedPrefix.size()) == kUnresolvedPrefix) {
        i = skip_balanced(s, i, '<', '>');
        push(TokKind::Word, b, i, true);
        continue;
      }
      ++i;
      push(TokKind::Punct, b, i);
      continue;
    }
    if (c == '!') {
      ++i;
      if (i < s.size() && s[i] == '"') {
        i = skip_string(s, i);
      } else if (i < s.size() && s[i] == '{') {
        i = skip_balanced(s, i, '{', '}');
      } else {
        while (i < s.size() && (is_ident_char(s[i]) || s[i] == '\\'))
          ++i;
        if (i < s.size() && s[i] == '(')
          i = skip_balanced(s, i, '(', ')');
      }
      push(TokKind::Metadata, b, i);
      continue;
    }
    if (c == '#' && i + 1 < s.size() && is_digit(s[i + 1])) {
      ++i;
      while (i < s.size() && is_digit(s[i]))
        ++i;
      push(TokKind::AttrRef, b, i);
      continue;
    }
    if (c == '"') {
      i = skip_string(s, i);
      push(TokKind::String, b, i);
      continue;
    }
    if (c == 'c' && i + 1 < s.size() && s[i + 1] == '"') {
      i = skip_string(s, i + 1);
      push(TokKind::String, b, i);
      continue;
    }
    bool signed_num = (c == '-' || c == '+') && i + 1 < s.size() &&
                      is_digit(s[i + 1]);
    if (is_digit(c) || signed_num) {
      if (signed_num)
        ++i;
      if (s[i] == '0' && i + 1 < s.size() && (s[i + 1] == 'x')) {
        i += 2;
        if (i < s.size() && (s[i] == 'K' || s[i] == 'L' || s[i] == 'M' ||
                             s[i] == 'H' || s[i] == 'R'))
          ++i;
        while (i < s.size() && is_hex(s[i]))
          ++i;
        push(TokKind::Float, b, i);
        continue;
      }
      bool is_float = false;
      while (i < s.size() && is_digit(s[i]))
        ++i;
      if (i < s.size() && s[i] == '.') {
        is_float = true;
        ++i;
        while (i < s.size() && is_digit(s[i]))
          ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-'))
          ++j;
        if (j < s.size() && is_digit(s[j])) {
          is_float = true;
          i = j;
          while (i < s.size() && is_digit(s[i]))
            ++i;
        }
      }
      push(is_float ? TokKind::Float : TokKind::Int, b, i);
      continue;
    }
    if (is_word_start(c)) {
      if (c == '.' && s.substr(i, 3) == "...") {
        i += 3;
        push(TokKind::Punct, b, i);
        continue;
      }
      ++i;
      while (i < s.size() && is_word_char(s[i]))
        ++i;
      push(TokKind::Word, b, i);
      continue;
    }
    ++i;
    push(TokKind::Punct, b, i);
  }
  return out;
}

std::string_view strip_comment(std::string_view line) noexcept {
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '"') {
      i = skip_string(line, i);
      continue;
    }
    if (line[i] == ';')
      return line.substr(0, i);
    ++i;
  }
  return line;
}

int bracket_balance(std::string_view line) noexcept {
  int depth = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '"') {
      i = skip_string(line, i);
      continue;
    }
    if (c == ';')
      break;
    if (c == '(' || c == '[' || c == '{')
      ++depth;
    else if (c == ')' || c == ']' || c == '}')
      --depth;
    ++i;
  }
  return depth;
}

std::string strip_metadata_attachments(std::string_view line) {
  auto toks = lex(line);
  std::vector<std::pair<std::size_t, std::size_t>> cuts;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const auto &t = toks[i];
    if (t.kind != TokKind::Metadata || t.text.size() < 2 ||
        !std::isalpha(static_cast<unsigned char>(t.text[1])))
      continue;
    if (toks[i + 1].kind != TokKind::Metadata)
      continue;
    if (i > 0 && toks[i - 1].word("metadata"))
      continue;
    std::size_t b = t.begin;
    if (i > 0 && toks[i - 1].punct(","))
      b = toks[i - 1].begin;
    cuts.emplace_back(b, toks[i + 1].end());
    ++i;
  }
  if (cuts.empty())
    return std::string(line);
  std::string out;
  std::size_t pos = 0;
  for (auto [b, e] : cuts) {
    out.append(line.substr(pos, b - pos));
    pos = e;
  }
  out.append(line.substr(pos));
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
    out.pop_back();
  // Attachments between `)` and `{` on define lines leave a double space.
  std::string squeezed;
  squeezed.reserve(out.size());
  bool in_str = false;
  for (char ch : out) {
    if (ch == '"')
      in_str = !in_str;
    if (!in_str && ch == ' ' && !squeezed.empty() && squeezed.back() == ' ')
      continue;
    squeezed.push_back(ch);
  }
  return squeezed;
}

std::string_view token_range_text(std::string_view source,
                                  const std::vector<Token> &toks,
                                  std::size_t first, std::size_t last) noexcept {
  if (first >= last || last > toks.size())
    return {};
  std::size_t b = toks[first].begin;
  std::size_t e = toks[last - 1].end();
  return source.substr(b, e - b);
}

} // namespace xflow::syntax
