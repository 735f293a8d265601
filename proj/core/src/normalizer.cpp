//===- normalizer.cpp - Statement normalization ----------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/normalizer.hpp"

#include "xflow/error.hpp"
#include "xflow/parser.hpp"
#include "xflow/syntax.hpp"

#include <cctype>
#include <set>

namespace xflow {
namespace {

using syntax::Role;
using syntax::TokKind;
using syntax::Token;

bool has_space(std::string_view s) noexcept {
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)))
      return true;
  return false;
}

std::string unresolved_marker(std::string_view name) {
  return "<UNRESOLVED:" + std::string(name) + ">";
}

class TypeInliner {
public:
  TypeInliner(const NamedTypeMap &layouts, std::vector<std::string> *warnings,
              int depth_limit)
      : layouts_(layouts), warnings_(warnings), limit_(depth_limit) {}

  NamedTypeMap run() {
    NamedTypeMap out;
    for (const auto &[name, layout] : layouts_)
      out.emplace(name, expand_name(name));
    return out;
  }

private:
  std::string expand_layout(std::string_view layout) {
    auto toks = syntax::lex(layout);
    std::string out;
    std::size_t prev = 0;
    for (const auto &t : toks) {
      out.append(layout.substr(prev, t.begin - prev));
      if (t.kind == TokKind::LocalId && !t.placeholder)
        out += expand_name(std::string(identifier_name(t.text)));
      else
        out.append(t.text);
      prev = t.end();
    }
    out.append(layout.substr(prev));
    return out;
  }

  std::string expand_name(const std::string &name) {
    auto it = layouts_.find(name);
    if (it == layouts_.end())
      return unresolved_marker(name);
    if (auto m = memo_.find(name); m != memo_.end())
      return m->second;
    int &depth = active_[name];
    if (depth >= limit_) {
      ++recursion_hits_;
      if (warnings_ && warned_.insert(name).second)
        warnings_->push_back("RecursionLimit: %" + name);
      return "<RECURSIVE>";
    }
    const std::size_t hits_before = recursion_hits_;
    ++depth;
    std::string r = expand_layout(it->second);
    --active_[name];
    // Expansions that cut a cycle depend on the current stack.
    if (recursion_hits_ == hits_before)
      memo_.emplace(name, r);
    return r;
  }

  const NamedTypeMap &layouts_;
  std::vector<std::string> *warnings_;
  int limit_;
  std::map<std::string, int> active_;
  std::map<std::string, std::string> memo_;
  std::set<std::string> warned_;
  std::size_t recursion_hits_ = 0;
};

} // namespace

std::string_view to_string(ImmKind kind) noexcept {
  switch (kind) {
  case ImmKind::Int:
    return "INT";
  case ImmKind::Float:
    return "FLOAT";
  case ImmKind::String:
    return "STRING";
  }
  return "?";
}

std::string serialize(const NormalizedStmt &stmt) {
  std::string out = stmt.text;
  out.push_back('\t');
  for (std::size_t i = 0; i < stmt.immediates.size(); ++i) {
    if (i)
      out.push_back(',');
    out += stmt.immediates[i].literal;
  }
  return out;
}

NamedTypeMap inline_types(const NamedTypeMap &layouts,
                          std::vector<std::string> *warnings,
                          int depth_limit) {
  return TypeInliner(layouts, warnings, std::max(depth_limit, 1)).run();
}

NormalizedStmt normalize(const IrStatement &stmt, const NamedTypeMap &types,
                         std::vector<std::string> *warnings) {
  const std::string &text = stmt.raw_text;
  auto is_named = [&types](std::string_view tok) {
    return types.count(std::string(identifier_name(tok))) > 0 ||
           syntax::looks_like_named_type(tok);
  };
  auto sc = syntax::scan_statement(text, is_named);

  const bool header = (sc.opcode == "define" || sc.opcode == "declare") &&
                      sc.function_name_token && sc.param_list_close;
  std::set<std::size_t> param_names;
  if (header)
    for (const auto &p : sc.params)
      if (p)
        param_names.insert(*p);
  const std::size_t stop = header ? *sc.param_list_close + 1 : sc.tokens.size();

  NormalizedStmt out;
  out.origin = &stmt;
  std::size_t prev_end = 0;
  bool first = true;
  for (std::size_t k = 0; k < stop; ++k) {
    const Token &t = sc.tokens[k];
    const Role role = sc.roles[k];
    if (role == Role::AttrRef || t.kind == TokKind::Metadata ||
        param_names.count(k)) {
      prev_end = t.end();
      continue;
    }
    if (!first && has_space(std::string_view(text).substr(
                      prev_end, t.begin - prev_end)))
      out.text.push_back(' ');
    first = false;
    prev_end = t.end();

    if (t.placeholder) {
      out.text.append(t.text);
      continue;
    }
    switch (role) {
    case Role::Local:
    case Role::Label:
      out.text += "<%ID>";
      break;
    case Role::Global:
      out.text += "<@ID>";
      break;
    case Role::ImmInt:
      out.text += "<INT>";
      out.immediates.push_back(Immediate{ImmKind::Int, std::string(t.text)});
      break;
    case Role::ImmFloat:
      out.text += "<FLOAT>";
      out.immediates.push_back(Immediate{ImmKind::Float, std::string(t.text)});
      break;
    case Role::ImmString:
      out.text += "<STRING>";
      out.immediates.push_back(
          Immediate{ImmKind::String, std::string(t.text)});
      break;
    case Role::NamedType: {
      std::string name(identifier_name(t.text));
      auto it = types.find(name);
      if (it != types.end()) {
        out.text += it->second;
      } else {
        out.text += unresolved_marker(name);
        if (warnings)
          warnings->push_back("UnresolvedType: %" + name);
      }
      break;
    }
    default:
      out.text.append(t.text);
      break;
    }
  }
  if (header) {
    for (std::size_t k = stop; k < sc.tokens.size(); ++k) {
      const Token &t = sc.tokens[k];
      if (t.word("unnamed_addr") || t.word("local_unnamed_addr")) {
        out.text.push_back(' ');
        out.text.append(t.text);
      }
    }
  }
  return out;
}

NormalizedStmt normalize_text(std::string_view statement,
                              const NamedTypeMap &types) {
  // The returned origin would dangle; callers of this helper only want text.
  IrStatement s = parse_statement(statement);
  NormalizedStmt n = normalize(s, inline_types(types));
  n.origin = nullptr;
  return n;
}

NormalizedModule::NormalizedModule(const IrModule &module)
    : types_(inline_types(module.named_types, &warnings_)) {
  auto add = [this](const IrStatement &s) {
    index_.emplace(&s, stmts_.size());
    stmts_.push_back(normalize(s, types_, &warnings_));
  };
  for (const auto &g : module.globals)
    add(g.definition);
  for (const auto &f : module.functions) {
    add(f.header);
    for (const auto &b : f.blocks)
      for (const auto &s : b.statements)
        add(s);
  }
}

const NormalizedStmt *NormalizedModule::find(const IrStatement &stmt) const {
  auto it = index_.find(&stmt);
  return it == index_.end() ? nullptr : &stmts_[it->second];
}

const NormalizedStmt &NormalizedModule::at(const IrStatement &stmt) const {
  if (const auto *n = find(stmt))
    return *n;
  throw Error(ErrorCode::InvalidArgument,
              "statement is not part of the normalized module: " +
                  stmt.raw_text);
}

} // namespace xflow
