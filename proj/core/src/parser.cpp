//===- parser.cpp - LLVM IR assembly parser --------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Line oriented: the LLVM printer puts one statement per line, so the parser
// splits on newlines, re-joins the few constructs that span lines (switch
// tables, multi-line initializers) by bracket balance, and hands each logical
// line to the statement scanner.
//
//===----------------------------------------------------------------------===//

#include "xflow/parser.hpp"

#include "xflow/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace xflow {
namespace {

constexpr std::array<std::string_view, 72> kKnownOpcodes = {
    "ret",         "br",           "switch",        "indirectbr",
    "invoke",      "resume",       "unreachable",   "cleanupret",
    "catchret",    "catchswitch",  "callbr",        "fneg",
    "add",         "fadd",         "sub",           "fsub",
    "mul",         "fmul",         "udiv",          "sdiv",
    "fdiv",        "urem",         "srem",          "frem",
    "shl",         "lshr",         "ashr",          "and",
    "or",          "xor",          "extractelement", "insertelement",
    "shufflevector", "extractvalue", "insertvalue", "alloca",
    "load",        "store",        "fence",         "cmpxchg",
    "atomicrmw",   "getelementptr", "trunc",        "zext",
    "sext",        "fptrunc",      "fpext",         "fptoui",
    "fptosi",      "uitofp",       "sitofp",        "ptrtoint",
    "inttoptr",    "bitcast",      "addrspacecast", "icmp",
    "fcmp",        "phi",          "select",        "call",
    "va_arg",      "landingpad",   "catchpad",      "cleanuppad",
    "freeze",      "cleanup",      "catch",         "filter",
    "global",      "constant",     "define",        "declare"};

bool known_opcode(std::string_view op) {
  return std::find(kKnownOpcodes.begin(), kKnownOpcodes.end(), op) !=
         kKnownOpcodes.end();
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool starts_with_word(std::string_view s, std::string_view w) noexcept {
  return s.starts_with(w) &&
         (s.size() == w.size() ||
          std::isspace(static_cast<unsigned char>(s[w.size()])));
}

bool is_debug_intrinsic_call(const IrStatement &s) {
  if (s.opcode != "call" || !s.callee)
    return false;
  const auto &name = s.operands[*s.callee].text;
  return name.starts_with("@llvm.dbg.");
}

IrStatement to_statement(const syntax::StatementScan &sc, std::string text,
                         int line) {
  IrStatement s;
  s.opcode = sc.opcode;
  if (sc.result_token)
    s.result = std::string(sc.tokens[*sc.result_token].text);
  s.operands = sc.operands;
  s.callee = sc.callee;
  s.type_tokens.reserve(sc.types.size());
  for (const auto &t : sc.types)
    s.type_tokens.push_back(t.text);
  s.line = line;
  s.raw_text = std::move(text);
  return s;
}

class ModuleParser {
public:
  ModuleParser(std::string_view source, std::string path) : src_(source) {
    module_.source_path = std::move(path);
  }

  ParseResult run() {
    split_lines();
    prescan();
    std::size_t i = 0;
    while (i < lines_.size() && !diags_.fatal)
      i = top_level(i);
    ParseResult r;
    if (!diags_.fatal) {
      classify_function_refs();
      r.module = std::move(module_);
    }
    r.diagnostics = std::move(diags_);
    return r;
  }

private:
  struct RawLine {
    int number;
    std::string_view text;
  };

  void split_lines() {
    std::size_t pos = 0;
    int n = 1;
    while (pos <= src_.size()) {
      std::size_t nl = src_.find('\n', pos);
      std::string_view l = src_.substr(
          pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      if (!l.empty() && l.back() == '\r')
        l.remove_suffix(1);
      lines_.push_back(RawLine{n++, l});
      if (nl == std::string_view::npos)
        break;
      pos = nl + 1;
    }
  }

  // Named types and function symbols are needed before statements that use
  // them are scanned.
  void prescan() {
    for (const auto &l : lines_) {
      auto t = trim(syntax::strip_comment(l.text));
      if (t.empty())
        continue;
      if (t.front() == '%') {
        auto toks = syntax::lex(t);
        if (toks.size() >= 3 && toks[1].punct("=") && toks[2].word("type"))
          type_names_.insert(std::string(identifier_name(toks[0].text)));
      } else if (starts_with_word(t, "define") ||
                 starts_with_word(t, "declare")) {
        auto toks = syntax::lex(t);
        for (std::size_t k = 0; k + 1 < toks.size(); ++k)
          if (toks[k].kind == syntax::TokKind::GlobalId &&
              toks[k + 1].punct("(")) {
            function_names_.insert(std::string(identifier_name(toks[k].text)));
            break;
          }
      }
    }
    named_ = [this](std::string_view tok) {
      return type_names_.count(std::string(identifier_name(tok))) > 0 ||
             syntax::looks_like_named_type(tok);
    };
  }

  // Join a logical line starting at `i`; returns the index after it.
  // `joined` receives the comment-free text. Sets `unbalanced` on EOF.
  std::size_t logical_line(std::size_t i, std::string &joined,
                           bool &unbalanced, bool stop_at_brace) {
    joined = std::string(trim(syntax::strip_comment(lines_[i].text)));
    int depth = syntax::bracket_balance(joined);
    std::size_t j = i + 1;
    unbalanced = false;
    while (depth > 0) {
      if (j >= lines_.size()) {
        unbalanced = true;
        return j;
      }
      auto next = trim(syntax::strip_comment(lines_[j].text));
      if (stop_at_brace && next == "}") {
        unbalanced = true;
        return j;
      }
      if (!next.empty()) {
        joined.push_back(' ');
        joined.append(next);
        depth += syntax::bracket_balance(next);
      }
      ++j;
    }
    return j;
  }

  IrStatement make_statement(std::string text, int line) {
    auto sc = syntax::scan_statement(text, named_);
    for (std::size_t k = 0; k < sc.tokens.size(); ++k) {
      if (sc.roles[k] != syntax::Role::NamedType)
        continue;
      std::string name(identifier_name(sc.tokens[k].text));
      if (!type_names_.count(name) && unresolved_seen_.insert(name).second) {
        module_.unresolved_types.push_back(name);
        diags_.warn(line, "UnresolvedType: %" + name);
      }
    }
    auto stmt = to_statement(sc, std::move(text), line);
    return stmt;
  }

  std::size_t top_level(std::size_t i) {
    const auto &raw = lines_[i];
    auto t = trim(syntax::strip_comment(raw.text));
    if (t.empty()) {
      if (!trim(raw.text).empty())
        ++diags_.skipped_lines;
      return i + 1;
    }
    if (t.front() == '!' || starts_with_word(t, "attributes") ||
        starts_with_word(t, "source_filename") ||
        starts_with_word(t, "target") || starts_with_word(t, "uselistorder") ||
        t.front() == '$') {
      ++diags_.skipped_lines;
      return i + 1;
    }
    if (starts_with_word(t, "define"))
      return function_definition(i);
    if (starts_with_word(t, "module")) {
      diags_.warn(raw.number, "skipped module-level asm");
      ++diags_.skipped_lines;
      return i + 1;
    }

    std::string joined;
    bool unbalanced = false;
    std::size_t next = logical_line(i, joined, unbalanced, false);
    if (unbalanced) {
      diags_.warn(raw.number, "unbalanced brackets at top level; skipped");
      diags_.skipped_lines += next - i;
      return next;
    }
    joined = syntax::strip_metadata_attachments(joined);

    if (starts_with_word(joined, "declare")) {
      IrFunction f;
      f.is_declaration_only = true;
      f.header = make_statement(joined, raw.number);
      auto sc = syntax::scan_statement(f.header.raw_text, named_);
      if (!sc.function_name_token) {
        diags_.warn(raw.number, "declaration without a symbol name; skipped");
        return next;
      }
      f.name = identifier_name(sc.tokens[*sc.function_name_token].text);
      add_function(std::move(f), raw.number);
      return next;
    }

    auto toks = syntax::lex(joined);
    if (toks.size() >= 3 && toks[0].kind == syntax::TokKind::LocalId &&
        toks[1].punct("=") && toks[2].word("type")) {
      std::string name(identifier_name(toks[0].text));
      std::string layout(trim(std::string_view(joined).substr(toks[2].end())));
      module_.named_types[name] = layout;
      return next;
    }
    if (toks.size() >= 2 && toks[0].kind == syntax::TokKind::GlobalId &&
        toks[1].punct("=")) {
      auto stmt = make_statement(joined, raw.number);
      if (stmt.opcode == "global" || stmt.opcode == "constant") {
        IrGlobal g;
        g.name = identifier_name(*stmt.result);
        g.definition = std::move(stmt);
        module_.globals.push_back(std::move(g));
      } else {
        diags_.warn(raw.number, "skipped global-scope construct '" +
                                    stmt.opcode + "'");
        ++diags_.skipped_lines;
      }
      return next;
    }
    if (t == "}") {
      diags_.warn(raw.number, "stray '}' at top level");
      return i + 1;
    }
    diags_.warn(raw.number, "unrecognized top-level line; skipped");
    ++diags_.skipped_lines;
    return next;
  }

  void add_function(IrFunction f, int line) {
    for (const auto &g : module_.functions)
      if (g.name == f.name) {
        diags_.warn(line, "duplicate function @" + f.name + "; later copy kept "
                          "under a suffixed name");
        f.name += ".dup" + std::to_string(line);
        break;
      }
    module_.functions.push_back(std::move(f));
  }

  std::size_t function_definition(std::size_t i) {
    const int start_line = lines_[i].number;
    std::string header(trim(syntax::strip_comment(lines_[i].text)));
    header = syntax::strip_metadata_attachments(header);
    std::size_t j = i + 1;
    if (header.empty() || header.back() != '{') {
      // Tolerate a brace on the following line.
      while (j < lines_.size() &&
             trim(syntax::strip_comment(lines_[j].text)).empty())
        ++j;
      if (j < lines_.size() &&
          trim(syntax::strip_comment(lines_[j].text)) == "{") {
        header += " {";
        ++j;
      } else {
        diags_.fatal = Diagnostic{start_line, "FatalSyntax: function header "
                                              "without an opening brace"};
        return lines_.size();
      }
    }

    IrFunction f;
    f.header = make_statement(header, start_line);
    auto sc = syntax::scan_statement(f.header.raw_text, named_);
    if (!sc.function_name_token) {
      diags_.fatal =
          Diagnostic{start_line, "FatalSyntax: function without a name"};
      return lines_.size();
    }
    f.name = identifier_name(sc.tokens[*sc.function_name_token].text);
    int unnamed = 0;
    for (const auto &p : sc.params) {
      if (p)
        f.params.emplace_back(identifier_name(sc.tokens[*p].text));
      else
        f.params.push_back(std::to_string(unnamed++));
    }

    std::vector<SourceLine> body;
    bool closed = false;
    while (j < lines_.size()) {
      const auto &raw = lines_[j];
      auto trimmed_raw = trim(raw.text);
      if (trimmed_raw.starts_with("; <label>:")) {
        // Pre-LLVM-9 printers emit unnamed block labels as comments.
        auto rest = trimmed_raw.substr(10);
        std::size_t k = 0;
        while (k < rest.size() &&
               std::isdigit(static_cast<unsigned char>(rest[k])))
          ++k;
        if (k > 0) {
          body.push_back(SourceLine{raw.number, std::string(rest.substr(0, k)) +
                                                    ":"});
          ++j;
          continue;
        }
      }
      auto t = trim(syntax::strip_comment(raw.text));
      if (t.empty()) {
        if (!trimmed_raw.empty())
          ++diags_.skipped_lines;
        ++j;
        continue;
      }
      if (t == "}") {
        closed = true;
        ++j;
        break;
      }
      if (starts_with_word(t, "define")) {
        diags_.fatal = Diagnostic{start_line, "FatalSyntax: body of @" +
                                                  f.name + " is not closed"};
        return lines_.size();
      }
      std::string joined;
      bool unbalanced = false;
      std::size_t next = logical_line(j, joined, unbalanced, true);
      if (unbalanced) {
        diags_.fatal = Diagnostic{
            raw.number, "FatalSyntax: unbalanced brackets in body of @" +
                            f.name};
        return lines_.size();
      }
      body.push_back(SourceLine{raw.number, std::move(joined)});
      j = next;
    }
    if (!closed) {
      diags_.fatal = Diagnostic{start_line, "FatalSyntax: body of @" + f.name +
                                                " is not closed"};
      return lines_.size();
    }

    auto build = [this](const SourceLine &l) -> std::optional<IrStatement> {
      auto text = syntax::strip_metadata_attachments(l.text);
      auto stmt = make_statement(std::move(text), l.line);
      if (is_debug_intrinsic_call(stmt)) {
        ++diags_.skipped_lines;
        return std::nullopt;
      }
      if (!known_opcode(stmt.opcode))
        diags_.warn(l.line, "UnknownOpcode: '" + stmt.opcode + "'");
      return stmt;
    };
    f.blocks = split_blocks(body, diags_, std::to_string(unnamed), build);
    if (f.blocks.empty()) {
      diags_.warn(start_line, "function @" + f.name + " has an empty body");
      f.blocks.push_back(IrBasicBlock{std::to_string(unnamed), {}});
    }
    add_function(std::move(f), start_line);
    return j;
  }

  void classify_function_refs() {
    std::unordered_set<std::string> names;
    for (const auto &f : module_.functions)
      names.insert(f.name);
    auto fix = [&](IrStatement &s) {
      for (auto &op : s.operands)
        if (op.kind == OperandKind::GlobalId &&
            names.count(std::string(identifier_name(op.text))))
          op.kind = OperandKind::FunctionRef;
    };
    for (auto &g : module_.globals)
      fix(g.definition);
    for (auto &f : module_.functions)
      for (auto &b : f.blocks)
        for (auto &s : b.statements)
          fix(s);
  }

  std::string_view src_;
  std::vector<RawLine> lines_;
  std::set<std::string> type_names_;
  std::set<std::string> function_names_;
  std::set<std::string> unresolved_seen_;
  syntax::NamedTypePredicate named_;
  IrModule module_;
  ParseDiagnostics diags_;
};

} // namespace

std::string ParseDiagnostics::serialize() const {
  std::ostringstream os;
  for (const auto &w : warnings)
    os << "warning\t" << w.line << '\t' << w.message << '\n';
  os << "info\t0\tskipped " << skipped_lines << " lines\n";
  if (fatal)
    os << "fatal\t" << fatal->line << '\t' << fatal->message << '\n';
  return os.str();
}

ParseResult parse_module(std::string_view source, std::string source_path) {
  return ModuleParser(source, std::move(source_path)).run();
}

IrModule read_module(const std::filesystem::path &path,
                     ParseDiagnostics *diagnostics) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto result = parse_module(buf.str(), path.string());
  if (diagnostics)
    *diagnostics = result.diagnostics;
  if (!result.module)
    throw Error(ErrorCode::FatalSyntax,
                path.string() + ":" +
                    std::to_string(result.diagnostics.fatal->line) + ": " +
                    result.diagnostics.fatal->message);
  return std::move(*result.module);
}

IrStatement parse_statement(std::string_view text, int line) {
  std::string stripped = syntax::strip_metadata_attachments(
      trim(syntax::strip_comment(text)));
  auto sc = syntax::scan_statement(stripped, syntax::looks_like_named_type);
  return to_statement(sc, std::move(stripped), line);
}

std::optional<std::string> label_of(std::string_view line) {
  auto t = trim(syntax::strip_comment(line));
  if (t.size() < 2 || t.back() != ':')
    return std::nullopt;
  auto name = t.substr(0, t.size() - 1);
  if (name.front() == '"') {
    if (name.size() >= 2 && name.back() == '"' &&
        name.substr(1, name.size() - 2).find('"') == std::string_view::npos)
      return std::string(name);
    return std::nullopt;
  }
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '-' || c == '$' || c == '.' || c == '_'))
      return std::nullopt;
  }
  return std::string(name);
}

std::vector<IrBasicBlock> split_blocks(std::span<const SourceLine> body,
                                       ParseDiagnostics &diagnostics,
                                       std::string_view entry_label,
                                       const StatementBuilder &build) {
  std::vector<IrBasicBlock> blocks;
  std::optional<IrBasicBlock> current;
  auto close_current = [&](int line) {
    if (!current)
      return;
    if (current->statements.empty() ||
        !current->statements.back().is_terminator())
      diagnostics.warn(line, "block '" + current->label +
                                 "' does not end in a terminator");
    blocks.push_back(std::move(*current));
    current.reset();
  };
  for (const auto &l : body) {
    if (auto label = label_of(l.text)) {
      close_current(l.line);
      current = IrBasicBlock{*label, {}};
      continue;
    }
    std::optional<IrStatement> stmt =
        build ? build(l) : std::optional<IrStatement>(parse_statement(l.text,
                                                                      l.line));
    if (!stmt)
      continue;
    if (!current) {
      if (blocks.empty()) {
        current = IrBasicBlock{std::string(entry_label), {}};
      } else {
        diagnostics.warn(l.line, "ImplicitBlock: statement without a label");
        current = IrBasicBlock{"implicit." + std::to_string(l.line), {}};
      }
    } else if (!current->statements.empty() &&
               current->statements.back().is_terminator()) {
      blocks.push_back(std::move(*current));
      diagnostics.warn(l.line,
                       "ImplicitBlock: statement follows a terminator without "
                       "a label");
      current = IrBasicBlock{"implicit." + std::to_string(l.line), {}};
    }
    current->statements.push_back(std::move(*stmt));
  }
  if (current) {
    int last_line = body.empty() ? 0 : body.back().line;
    close_current(last_line);
  }
  return blocks;
}

} // namespace xflow
