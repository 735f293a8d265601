#include "support.hpp"

#include "xflow/dual_graph.hpp"
#include "xflow/error.hpp"
#include "xflow/random.hpp"
#include "xflow/synthetic.hpp"

#include <doctest.h>

using namespace xflow;
using Adj = std::vector<std::vector<std::uint32_t>>;

namespace {

Adj path_graph(std::uint32_t n) {
  Adj adj(n);
  for (std::uint32_t i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  return adj;
}

Adj star_graph(std::uint32_t leaves) {
  Adj adj(leaves + 1);
  for (std::uint32_t i = 1; i <= leaves; ++i) {
    adj[0].push_back(i);
    adj[i].push_back(0);
  }
  return adj;
}

Adj random_graph(Rng &rng, std::uint32_t n, double p) {
  Adj adj(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
  return adj;
}

std::set<std::pair<std::uint32_t, std::uint32_t>>
as_set(const std::vector<std::pair<std::uint32_t, std::uint32_t>> &v) {
  return {v.begin(), v.end()};
}

void check_against_oracle(const Adj &adj, const std::vector<std::string> &texts) {
  auto g = test::graph_from_adjacency(adj, texts);
  for (int n = 1; n <= 3; ++n) {
    auto pairs = context_pairs(g, n);
    CHECK(as_set(pairs).size() == pairs.size());
    CHECK(as_set(pairs) == test::brute_force_pairs(adj, texts, n));
  }
}

} // namespace

TEST_SUITE("dual_graph") {

TEST_CASE("path and star graphs match the BFS oracle") {
  for (std::uint32_t n : {1u, 2u, 3u, 5u, 9u})
    check_against_oracle(path_graph(n), test::distinct_texts(n));
  for (std::uint32_t leaves : {1u, 4u, 7u})
    check_against_oracle(star_graph(leaves), test::distinct_texts(leaves + 1));
}

TEST_CASE("pair counts on a path") {
  // A path of k nodes has 2 * (k - d) ordered pairs at distance d.
  auto g = test::graph_from_adjacency(path_graph(4), test::distinct_texts(4));
  CHECK(context_pairs(g, 1).size() == 6);
  CHECK(context_pairs(g, 2).size() == 10);
  CHECK(context_pairs(g, 3).size() == 12);
  CHECK(context_pairs(g, 9).size() == 12);
}

TEST_CASE("pairs with identical text are dropped") {
  std::vector<std::string> texts{"x", "y", "x"};
  auto g = test::graph_from_adjacency(path_graph(3), texts);
  auto pairs = context_pairs(g, 2);
  CHECK(as_set(pairs) == test::brute_force_pairs(path_graph(3), texts, 2));
  for (auto [a, b] : pairs)
    CHECK(texts[a] != texts[b]);
  CHECK(pairs.size() == 4);
}

TEST_CASE("context size below one is rejected") {
  auto g = test::graph_from_adjacency(path_graph(2), test::distinct_texts(2));
  CHECK_THROWS_AS(context_pairs(g, 0), Error);
}

TEST_CASE("random graphs: oracle agreement and nesting in N") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto n = static_cast<std::uint32_t>(1 + uniform_below(rng, 50));
    auto adj = random_graph(rng, n, 0.02 + 0.2 * uniform01(rng));
    std::vector<std::string> texts;
    for (std::uint32_t i = 0; i < n; ++i)
      texts.push_back("t" + std::to_string(uniform_below(rng, n)));
    auto g = test::graph_from_adjacency(adj, texts);
    std::set<std::pair<std::uint32_t, std::uint32_t>> prev;
    for (int k = 1; k <= 4; ++k) {
      auto cur = as_set(context_pairs(g, k));
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      if (k <= 3)
        CHECK(cur == test::brute_force_pairs(adj, texts, k));
      prev = std::move(cur);
    }
  }
}

TEST_CASE("parallel edges merge and self loops vanish") {
  StatementGraph g(test::distinct_texts(3),
                   {{0, 1, kDataAdjacency},
                    {1, 0, kExecutionAdjacency},
                    {2, 2, kDataAdjacency}});
  CHECK(g.edge_count() == 1);
  auto e = g.edges();
  REQUIRE(e.size() == 1);
  CHECK(e[0].a == 0);
  CHECK(e[0].b == 1);
  CHECK(e[0].flags == (kDataAdjacency | kExecutionAdjacency));
  CHECK(g.neighbors(2).empty());
}

TEST_CASE("straight-line function gives a path") {
  auto m = test::parse_ok(test::slurp(test::fixtures_dir() / "xfg/straight_line.ll"));
  auto g = dual_graph(build_xfg(m));
  REQUIRE(g.size() == 4);
  auto e = g.edges();
  REQUIRE(e.size() == 3);
  CHECK((e[0].a == 0 && e[0].b == 1 && e[0].flags == kExecutionAdjacency));
  CHECK((e[1].a == 1 && e[1].b == 2 && e[1].flags == kDataAdjacency));
  CHECK((e[2].a == 2 && e[2].b == 3 && e[2].flags == kDataAdjacency));
  CHECK(g.filtered(ContextType::Dfg).edge_count() == 2);
  CHECK(g.filtered(ContextType::Cfg).edge_count() == 1);
}

TEST_CASE("filtered graphs partition the adjacency flags") {
  auto m = test::parse_ok(synthetic_module({.seed = 8}));
  auto g = dual_graph(build_xfg(m));
  auto cfg = g.filtered(ContextType::Cfg);
  auto dfg = g.filtered(ContextType::Dfg);
  auto xfg = g.filtered(ContextType::Xfg);
  CHECK(xfg.edge_count() == g.edge_count());
  std::size_t data = 0, exec = 0;
  for (const auto &e : g.edges()) {
    data += (e.flags & kDataAdjacency) != 0;
    exec += (e.flags & kExecutionAdjacency) != 0;
  }
  CHECK(dfg.edge_count() == data);
  CHECK(cfg.edge_count() == exec);
  CHECK(data + exec >= g.edge_count());
}

TEST_CASE("context type names") {
  for (auto t : {ContextType::Xfg, ContextType::Cfg, ContextType::Dfg})
    CHECK(context_type_from_string(to_string(t)) == t);
  CHECK_FALSE(context_type_from_string("ast"));
}

} // TEST_SUITE
