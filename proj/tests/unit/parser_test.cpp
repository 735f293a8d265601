#include "support.hpp"

#include "xflow/error.hpp"
#include "xflow/parser.hpp"
#include "xflow/random.hpp"
#include "xflow/synthetic.hpp"

#include <doctest.h>

using namespace xflow;

TEST_SUITE("parser") {

TEST_CASE("minimal function") {
  auto m = test::parse_ok("define i32 @id(i32 %x) {\n"
                          "entry:\n"
                          "  ret i32 %x\n"
                          "}\n");
  REQUIRE(m.functions.size() == 1);
  const auto &f = m.functions[0];
  CHECK(f.name == "id");
  CHECK(f.params == std::vector<std::string>{"x"});
  REQUIRE(f.blocks.size() == 1);
  CHECK(f.blocks[0].label == "entry");
  REQUIRE(f.blocks[0].statements.size() == 1);
  const auto &ret = f.blocks[0].statements[0];
  CHECK(ret.opcode == "ret");
  CHECK(ret.is_terminator());
  CHECK_FALSE(ret.result);
  REQUIRE(ret.operands.size() == 1);
  CHECK(ret.operands[0].kind == OperandKind::LocalId);
  CHECK(ret.operands[0].text == "%x");
}

TEST_CASE("unnamed parameters and entry block are numbered") {
  auto m = test::parse_ok("define i32 @f(i32, i32) {\n"
                          "  %3 = add i32 %0, %1\n"
                          "  ret i32 %3\n"
                          "}\n");
  const auto &f = m.functions.at(0);
  CHECK(f.params == std::vector<std::string>{"0", "1"});
  CHECK(f.blocks.at(0).label == "2");
}

TEST_CASE("phi incoming pairs") {
  auto s = parse_statement("%m = phi i32 [ %a, %then ], [ 7, %entry ]");
  CHECK(s.is_phi());
  CHECK(s.result == "%m");
  auto in = s.phi_incoming();
  REQUIRE(in.size() == 2);
  CHECK(in[0].first->text == "%a");
  CHECK(in[0].second->text == "%then");
  CHECK(in[0].second->kind == OperandKind::LabelRef);
  CHECK(in[1].first->kind == OperandKind::ImmInt);
  CHECK(in[1].second->text == "%entry");
}

TEST_CASE("call operands and callee") {
  auto s = parse_statement("%r = call i32 @g(i32 %x, i8* null)");
  CHECK(s.opcode == "call");
  REQUIRE(s.callee);
  CHECK(s.operands[*s.callee].kind == OperandKind::GlobalId);
  CHECK(s.operands[*s.callee].text == "@g");

  // Known functions are recognised once the whole module is read.
  auto m = test::parse_ok("declare i32 @g(i32, i8*)\n"
                          "define i32 @f(i32 %x) {\n"
                          "  %r = call i32 @g(i32 %x, i8* null)\n"
                          "  ret i32 %r\n}\n");
  const auto &call = m.find_function("f")->blocks.at(0).statements.at(0);
  REQUIRE(call.callee);
  CHECK(call.operands[*call.callee].kind == OperandKind::FunctionRef);
}

TEST_CASE("label_of") {
  CHECK(label_of("entry:") == "entry");
  CHECK(label_of("12:") == "12");
  CHECK(label_of("\"odd name\":") == "\"odd name\"");
  CHECK_FALSE(label_of("%x = add i32 1, 2"));
}

TEST_CASE("statement after a terminator starts an implicit block") {
  auto r = parse_module("define void @f() {\n"
                        "entry:\n"
                        "  br label %next\n"
                        "  ret void\n"
                        "next:\n"
                        "  ret void\n"
                        "}\n");
  REQUIRE(r.module);
  CHECK(r.module->functions[0].blocks.size() == 3);
  bool seen = false;
  for (const auto &w : r.diagnostics.warnings)
    seen |= w.message.starts_with("ImplicitBlock") && w.line == 4;
  CHECK(seen);
}

TEST_CASE("unclosed body is fatal") {
  auto r = parse_module("define void @f() {\nentry:\n  ret void\n");
  CHECK_FALSE(r.module);
  REQUIRE(r.diagnostics.fatal);
  CHECK(r.diagnostics.fatal->message.starts_with("FatalSyntax"));
  CHECK(r.diagnostics.fatal->line == 1);
}

TEST_CASE("read_module throws FatalSyntax and Io") {
  auto dir = std::filesystem::temp_directory_path() / "xflow_parser_test";
  std::filesystem::create_directories(dir);
  auto bad = dir / "bad.ll";
  { std::ofstream(bad) << "define void @f() {\n  ret void\n"; }
  try {
    read_module(bad);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::FatalSyntax);
  }
  try {
    read_module(dir / "missing.ll");
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("module asm, aliases and metadata are skipped with diagnostics") {
  auto r = parse_module("module asm \"nop\"\n"
                        "@a = alias i32, i32* @g\n"
                        "@g = global i32 0\n"
                        "!0 = !{}\n"
                        "attributes #0 = { nounwind }\n"
                        "define void @f() {\n"
                        "  ret void, !dbg !0\n"
                        "}\n");
  REQUIRE(r.module);
  CHECK(r.module->globals.size() == 1);
  CHECK(r.diagnostics.warnings.size() == 2);
  CHECK(r.diagnostics.skipped_lines == 4);
  CHECK(r.module->functions[0].blocks[0].statements[0].raw_text == "ret void");
}

TEST_CASE("named types and declarations") {
  auto m = test::parse_ok("%struct.p = type { i32, float }\n"
                          "declare i32 @printf(i8*, ...)\n"
                          "define void @f() {\n  ret void\n}\n");
  CHECK(m.named_types.at("struct.p") == "{ i32, float }");
  REQUIRE(m.functions.size() == 2);
  CHECK(m.functions[0].is_declaration_only);
  CHECK(m.find_function("printf") == &m.functions[0]);
}

TEST_CASE("switch operands are joined onto one statement") {
  auto m = test::parse_ok("define void @f(i32 %x) {\n"
                          "entry:\n"
                          "  switch i32 %x, label %d [\n"
                          "    i32 0, label %a\n"
                          "    i32 1, label %b\n"
                          "  ]\n"
                          "a:\n  ret void\n"
                          "b:\n  ret void\n"
                          "d:\n  ret void\n"
                          "}\n");
  const auto &sw = m.functions[0].blocks[0].statements.at(0);
  CHECK(sw.opcode == "switch");
  int labels = 0;
  for (const auto &o : sw.operands)
    labels += o.kind == OperandKind::LabelRef;
  CHECK(labels == 3);
  CHECK(m.functions[0].blocks.size() == 4);
}

TEST_CASE("to_text round-trips") {
  auto src = synthetic_module({.seed = 5, .functions = 6});
  auto m = test::parse_ok(src);
  auto text = to_text(m);
  auto again = test::parse_ok(text);
  CHECK(to_text(again) == text);
  CHECK(again.statement_count() == m.statement_count());
  CHECK(validate(again).empty());
}

TEST_CASE("parsing is deterministic") {
  auto src = synthetic_module({.seed = 9});
  auto a = parse_module(src);
  auto b = parse_module(src);
  REQUIRE(a.module);
  CHECK(*a.module == *b.module);
  CHECK(a.diagnostics == b.diagnostics);
}

TEST_CASE("fuzzed input never throws") {
  auto base = synthetic_module({.seed = 3, .functions = 4});
  Rng rng(77);
  const std::string alphabet = "{}[]()%@,=:;\n \"";
  for (int trial = 0; trial < 300; ++trial) {
    std::string s = base;
    int edits = 1 + static_cast<int>(uniform_below(rng, 8));
    for (int e = 0; e < edits && !s.empty(); ++e) {
      auto pos = uniform_below(rng, s.size());
      switch (uniform_below(rng, 3)) {
      case 0:
        s.erase(pos, 1 + uniform_below(rng, 20));
        break;
      case 1:
        s.insert(pos, 1, alphabet[uniform_below(rng, alphabet.size())]);
        break;
      default:
        s.resize(pos);
      }
    }
    ParseResult r;
    CHECK_NOTHROW(r = parse_module(s));
    CHECK(r.module.has_value() != r.diagnostics.fatal.has_value());
  }
}

TEST_CASE("duplicate results are reported") {
  auto m = test::parse_ok("define void @f(i32 %x) {\n"
                          "  %y = add i32 %x, 1\n"
                          "  %y = add i32 %x, 2\n"
                          "  ret void\n}\n");
  CHECK(duplicate_results(m.functions[0]) == std::vector<std::string>{"%y"});
  CHECK_FALSE(validate(m).empty());
}

} // TEST_SUITE
