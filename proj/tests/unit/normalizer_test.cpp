#include "support.hpp"

#include "xflow/normalizer.hpp"
#include "xflow/random.hpp"
#include "xflow/synthetic.hpp"

#include <doctest.h>

#include <regex>

using namespace xflow;

namespace {

std::vector<ImmKind> placeholders(const std::string &text) {
  static const std::regex re("<(INT|FLOAT|STRING)>");
  std::vector<ImmKind> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it) {
    auto k = (*it)[1].str();
    out.push_back(k == "INT" ? ImmKind::Int
                  : k == "FLOAT" ? ImmKind::Float
                                 : ImmKind::String);
  }
  return out;
}

bool has_concrete_identifier(const std::string &text) {
  static const std::regex placeholder("<[%@]ID>");
  static const std::regex re(R"([%@][-a-zA-Z$._0-9"])");
  return std::regex_search(std::regex_replace(text, placeholder, ""), re);
}

// A random statement together with the literals it was built from.
struct Generated {
  std::string text;
  std::vector<Immediate> literals;
};

struct StatementFuzzer {
  Rng rng;

  std::string local() {
    return uniform_below(rng, 2) ? "%" + std::to_string(uniform_below(rng, 40))
                                 : "%v" + std::to_string(uniform_below(rng, 9));
  }
  Immediate int_lit() {
    auto v = static_cast<std::int64_t>(uniform_below(rng, 100000)) - 50000;
    return {ImmKind::Int, std::to_string(v)};
  }
  Immediate float_lit() {
    switch (uniform_below(rng, 3)) {
    case 0:
      return {ImmKind::Float, "0x3FF00000000" + std::to_string(10000 + uniform_below(rng, 89999))};
    case 1:
      return {ImmKind::Float, std::to_string(uniform_below(rng, 9)) + ".5e+0" +
                                  std::to_string(uniform_below(rng, 9))};
    default:
      return {ImmKind::Float, "-" + std::to_string(uniform_below(rng, 99)) + ".25"};
    }
  }
  Immediate string_lit() {
    std::string s = "c\"";
    for (auto n = uniform_below(rng, 6); n > 0; --n)
      s += static_cast<char>('a' + uniform_below(rng, 26));
    return {ImmKind::String, s + "\\00\""};
  }

  Generated next() {
    Generated g;
    // Pieces are appended one statement at a time so the random draws, and
    // the literal order, follow the text left to right.
    auto put = [&](const std::string &piece) { g.text += piece; };
    auto lit = [&](Immediate i) {
      g.literals.push_back(i);
      g.text += i.literal;
    };
    switch (uniform_below(rng, 7)) {
    case 0:
      put(local());
      put(" = add nsw i32 ");
      put(local());
      put(", ");
      lit(int_lit());
      break;
    case 1:
      put(local());
      put(" = fmul double ");
      lit(float_lit());
      put(", ");
      put(local());
      break;
    case 2:
      put("store i64 ");
      lit(int_lit());
      put(", i64* ");
      put(local());
      put(", align 8");
      break;
    case 3:
      put("call void @f" + std::to_string(uniform_below(rng, 5)) + "(i32 ");
      lit(int_lit());
      put(", double ");
      lit(float_lit());
      put(")");
      break;
    case 4:
      put("@s" + std::to_string(uniform_below(rng, 5)) +
          " = private constant [4 x i8] ");
      lit(string_lit());
      put(", align 1");
      break;
    case 5:
      put(local());
      put(" = select i1 ");
      put(local());
      put(", i32 ");
      lit(int_lit());
      put(", i32 ");
      lit(int_lit());
      break;
    default:
      put(local());
      put(" = getelementptr inbounds [8 x i32], [8 x i32]* @t, i64 ");
      lit(int_lit());
      put(", i64 ");
      put(local());
    }
    return g;
  }
};

} // namespace

TEST_SUITE("normalizer") {

TEST_CASE("identifiers and immediates") {
  auto n = normalize_text("%5 = add i16 %3, 7");
  CHECK(n.text == "<%ID> = add i16 <%ID>, <INT>");
  CHECK(n.immediates == std::vector<Immediate>{{ImmKind::Int, "7"}});

  CHECK(normalize_text("store void ()* @h, void ()** %p, align 8").text ==
        "store void ()* <@ID>, void ()** <%ID>, align 8");
  CHECK(normalize_text("%c = alloca { i32, i32 }, align 4").text ==
        "<%ID> = alloca { i32, i32 }, align 4");
}

TEST_CASE("null and booleans survive, type dimensions are not immediates") {
  auto n = normalize_text("%5 = icmp eq double* %3, null");
  CHECK(n.text == "<%ID> = icmp eq double* <%ID>, null");
  CHECK(n.immediates.empty());
  auto v = normalize_text("%5 = and <8 x i32> %3, %4");
  CHECK(v.text == "<%ID> = and <8 x i32> <%ID>, <%ID>");
  auto c = normalize_text("call void @f(i1 true, i8* undef)");
  CHECK(c.text == "call void <@ID>(i1 true, i8* undef)");
}

TEST_CASE("string and float immediates") {
  auto s = normalize_text("@s = private constant [3 x i8] c\"hi\\00\", align 1");
  CHECK(s.text == "<@ID> = private constant [3 x i8] <STRING>, align 1");
  CHECK(s.immediates == std::vector<Immediate>{{ImmKind::String, "c\"hi\\00\""}});
  auto f = normalize_text("store double 0x3FF0000000000000, double* %p");
  CHECK(f.text == "store double <FLOAT>, double* <%ID>");
  CHECK(f.immediates.at(0).kind == ImmKind::Float);
}

TEST_CASE("serialized form") {
  auto n = normalize_text("%r = select i1 %c, i32 4, i32 5");
  CHECK(serialize(n) == "<%ID> = select i1 <%ID>, i32 <INT>, i32 <INT>\t4,5");
}

TEST_CASE("named types are inlined") {
  NamedTypeMap types = inline_types({{"struct.cpx", "{ float, float }"}});
  auto n = normalize_text("%7 = load %struct.cpx*, %struct.cpx** %3, align 8",
                          types);
  CHECK(n.text ==
        "<%ID> = load { float, float }*, { float, float }** <%ID>, align 8");
}

TEST_CASE("inline_types reaches a fixpoint") {
  auto t = inline_types({{"A", "{ %B, i8 }"}, {"B", "{ %C* }"}, {"C", "{ i64 }"}});
  CHECK(t.at("A") == "{ { { i64 }* }, i8 }");
  CHECK(t.at("B") == "{ { i64 }* }");
  for (const auto &[_, layout] : t)
    CHECK(layout.find('%') == std::string::npos);
}

TEST_CASE("recursive types stop at the depth limit") {
  std::vector<std::string> warnings;
  auto t = inline_types({{"N", "{ i32, %N* }"}}, &warnings);
  CHECK(t.at("N") == "{ i32, <RECURSIVE>* }");
  CHECK_FALSE(warnings.empty());

  auto mutual = inline_types({{"A", "{ %B* }"}, {"B", "{ %A* }"}});
  CHECK(mutual.at("A") == "{ { <RECURSIVE>* }* }");
  CHECK(inline_types({{"A", "{ %Missing }"}}).at("A") ==
        "{ <UNRESOLVED:Missing> }");
}

TEST_CASE("normalization is idempotent") {
  auto src = synthetic_module({.seed = 21});
  auto m = test::parse_ok(src);
  NormalizedModule nm(m);
  REQUIRE(nm.statements().size() > 100);
  for (const auto &s : nm.statements()) {
    auto again = normalize_text(s.text);
    CHECK(again.text == s.text);
    CHECK(again.immediates.empty());
  }
}

TEST_CASE("placeholders and immediates are in bijection") {
  StatementFuzzer fz{Rng(2024)};
  for (int i = 0; i < 10000; ++i) {
    auto g = fz.next();
    auto n = normalize_text(g.text);
    REQUIRE_MESSAGE(n.immediates == g.literals, g.text);
    std::vector<ImmKind> kinds;
    for (const auto &imm : n.immediates)
      kinds.push_back(imm.kind);
    REQUIRE(placeholders(n.text) == kinds);
    REQUIRE_FALSE_MESSAGE(has_concrete_identifier(n.text), n.text);
  }
}

TEST_CASE("module normalization keeps textual order") {
  auto m = test::parse_ok("@g = global i32 1\n"
                          "define i32 @f(i32 %x) {\n"
                          "  %y = add i32 %x, 2\n"
                          "  ret i32 %y\n}\n");
  NormalizedModule nm(m);
  std::vector<std::string> texts;
  for (const auto &s : nm.statements())
    texts.push_back(s.text);
  CHECK(texts == std::vector<std::string>{"<@ID> = global i32 <INT>",
                                          "define i32 <@ID>(i32)",
                                          "<%ID> = add i32 <%ID>, <INT>",
                                          "ret i32 <%ID>"});
  CHECK(&nm.at(m.functions[0].blocks[0].statements[0]) == &nm.statements()[2]);
  IrStatement foreign = parse_statement("ret void");
  CHECK_THROWS(nm.at(foreign));
}

} // TEST_SUITE
