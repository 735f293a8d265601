#include "support.hpp"

#include "xflow/error.hpp"
#include "xflow/vocab.hpp"

#include <doctest.h>

#include <cmath>

using namespace xflow;
namespace fs = std::filesystem;

namespace {

StatementCounts counts_of(std::initializer_list<std::pair<const char *, int>> kv) {
  StatementCounts c;
  for (auto [t, n] : kv)
    c.add(t, n);
  return c;
}

fs::path scratch(const char *name) {
  auto dir = fs::temp_directory_path() / "xflow_vocab_test";
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_SUITE("vocab") {

TEST_CASE("cutoff drops rare statements to the unknown token") {
  auto v = build_vocab(counts_of({{"A", 5}, {"B", 2}}), 3);
  CHECK(v.size() == 2);
  CHECK(v.text(0) == kUnknownToken);
  CHECK(v.id("A") == 1);
  CHECK(v.id("B") == kUnknownId);
  CHECK_FALSE(v.find("B"));
  CHECK(v.count(kUnknownId) == 2);
  CHECK(v.count(1) == 5);
}

TEST_CASE("cutoff 1 keeps everything") {
  auto v = build_vocab(counts_of({{"A", 1}, {"B", 1}, {"C", 4}}), 1);
  CHECK(v.size() == 4);
  for (auto t : {"A", "B", "C"})
    CHECK(v.find(t));
}

TEST_CASE("ids follow descending count then text") {
  auto v = build_vocab(counts_of({{"b", 3}, {"a", 3}, {"c", 9}, {"d", 1}}), 1);
  CHECK(v.text(1) == "c");
  CHECK(v.text(2) == "a");
  CHECK(v.text(3) == "b");
  CHECK(v.text(4) == "d");
}

TEST_CASE("nothing surviving is an error") {
  try {
    build_vocab(counts_of({{"A", 1}}), 2);
    FAIL("expected EmptyVocab");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::EmptyVocab);
  }
}

TEST_CASE("raising the cutoff never grows the vocabulary") {
  auto c = counts_of({{"a", 1}, {"b", 2}, {"c", 3}, {"d", 5}, {"e", 8}});
  std::size_t prev = SIZE_MAX;
  for (std::uint64_t cut = 1; cut <= 8; ++cut) {
    auto v = build_vocab(c, cut);
    CHECK(v.size() <= prev);
    prev = v.size();
    for (std::uint32_t i = 1; i < v.size(); ++i)
      CHECK(v.count(i) >= cut);
  }
}

TEST_CASE("count merging is associative") {
  auto a = counts_of({{"x", 1}, {"y", 2}});
  auto b = counts_of({{"y", 3}});
  auto c = counts_of({{"z", 1}, {"x", 4}});
  auto left = a;
  left.merge(b);
  left.merge(c);
  auto bc = b;
  bc.merge(c);
  auto right = a;
  right.merge(bc);
  CHECK(left.counts() == right.counts());
  CHECK(left.total() == 11);
}

TEST_CASE("vocab file round-trips, escapes included") {
  auto v = build_vocab(counts_of({{"plain", 3}, {"tab\there", 2}, {"back\\slash\nnl", 2}}), 1);
  auto text = v.serialize();
  CHECK(StmtVocab::parse(text) == v);
  CHECK(text.starts_with("0\t0\t!UNK\n"));
  auto path = scratch("v.tsv");
  v.save(path);
  auto loaded = StmtVocab::load(path);
  CHECK(loaded == v);
  CHECK(loaded.hash() == v.hash());
  CHECK(loaded.id("tab\there") == v.id("tab\there"));
}

TEST_CASE("subsample keeps rare pairs and is reproducible") {
  PairStream s;
  for (std::uint32_t i = 0; i < 1000; ++i)
    s.pairs.push_back({i, i + 1});
  // Every pair type has frequency 1/1000 < t.
  CHECK(subsample(s, 0.01, 3) == s);
  CHECK(subsample(PairStream{}, 1e-4, 1).pairs.empty());

  PairStream mixed;
  for (int i = 0; i < 500; ++i)
    mixed.pairs.push_back({1, 2});
  for (std::uint32_t i = 0; i < 500; ++i)
    mixed.pairs.push_back({3, i + 4});
  CHECK(subsample(mixed, 1e-3, 7) == subsample(mixed, 1e-3, 7));
}

TEST_CASE("one dominant pair at t = f/4 keeps half") {
  PairStream s;
  const int n = 10000;
  s.pairs.assign(n, {1, 2});
  auto kept = subsample(s, 0.25, 42).pairs.size();
  const double p = 0.5;
  const double sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(static_cast<double>(kept) - n * p) <= 3 * sigma);
}

TEST_CASE("pairs outside the vocabulary are dropped") {
  auto v = build_vocab(counts_of({{"a", 3}, {"b", 3}, {"rare", 1}}), 2);
  PairStream out;
  append_pairs(out, v, {"a", "b", "rare"}, {{0, 1}, {1, 0}, {0, 2}, {2, 1}});
  CHECK(out.pairs == std::vector<IdPair>{{v.id("a"), v.id("b")},
                                         {v.id("b"), v.id("a")}});
}

TEST_CASE("pair file round-trips and rejects damage") {
  PairStream s;
  s.pairs = {{1, 2}, {2, 1}, {7, 0xFFFFFFFFu}};
  auto path = scratch("p.bin");
  save_pairs(s, path);
  CHECK(load_pairs(path).pairs == s.pairs);
  auto bytes = serialize_pairs(s.pairs);
  CHECK(bytes.size() == 8 + 8 * 3);
  CHECK(bytes.substr(0, 8) == "XFGPAIR1");
  CHECK(parse_pairs(bytes) == s.pairs);

  auto bad = bytes;
  bad[0] = 'Y';
  try {
    parse_pairs(bad);
    FAIL("expected BadMagic");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::BadMagic);
  }
  try {
    parse_pairs(bytes.substr(0, bytes.size() - 3));
    FAIL("expected TruncatedFile");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::TruncatedFile);
  }
}

TEST_CASE("stats of a four-statement chain at N = 2") {
  std::vector<std::vector<std::uint32_t>> chain{{1}, {0, 2}, {1, 3}, {2}};
  auto g = test::graph_from_adjacency(chain, test::distinct_texts(4));
  auto pairs = context_pairs(g, 2);
  SourceManifest m;
  m.name = "chain";
  m.files = 1;
  m.ir_lines = 6;
  m.statements = g.texts();
  m.pairs = pairs.size();
  m.pairs_subsampled = pairs.size();
  auto st = corpus_stats({m});
  REQUIRE(st.rows.size() == 1);
  CHECK(st.rows[0].files == 1);
  CHECK(st.rows[0].pairs == 10);
  CHECK(st.rows[0].vocabulary == 4);
  auto expected = st.rows[0];
  expected.source = "combined";
  CHECK(st.combined == expected);
}

TEST_CASE("stats deduplicate statements across sources") {
  SourceManifest a{"a", 1, 10, {"x", "y"}, 4, 3};
  SourceManifest b{"b", 2, 20, {"y", "x"}, 6, 5};
  auto st = corpus_stats({a, b});
  CHECK(st.combined.vocabulary == 2);
  CHECK(st.combined.files == 3);
  CHECK(st.combined.ir_lines == 30);
  CHECK(st.combined.pairs == 10);
  CHECK(st.combined.pairs_subsampled == 8);
  CHECK(corpus_stats({}).combined == CorpusStatsRow{"combined"});
  CHECK(st.to_tsv().find("combined") != std::string::npos);
}

} // TEST_SUITE
