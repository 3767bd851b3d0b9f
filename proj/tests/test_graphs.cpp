#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "polygas/errors.hpp"
#include "polygas/graphs.hpp"
#include "support/oracles.hpp"

using namespace polygas;
using graphs::LabeledGraph;
using graphs::LabeledTree;

TEST_CASE("connected graph enumeration matches the counting recurrence") {
  CHECK(graphs::enumerate_connected_graphs(1).size() == 1);
  CHECK(graphs::enumerate_connected_graphs(3).size() == 4);
  CHECK(graphs::enumerate_connected_graphs(4).size() == 38);
  for (int n = 1; n <= 6; ++n) {
    std::uint64_t count = 0;
    graphs::for_each_connected_graph(n, [&](const LabeledGraph&) {
      ++count;
      return true;
    });
    CHECK(count == oracles::connected_graph_count(n));
  }
}

TEST_CASE("connected graph counts hold at the cap" * doctest::timeout(120)) {
  for (int n = 7; n <= 8; ++n) {
    std::uint64_t count = 0;
    graphs::for_each_connected_graph(n, [&](const LabeledGraph&) {
      ++count;
      return true;
    });
    CHECK(count == oracles::connected_graph_count(n));
  }
}

TEST_CASE("tree counts hold at the cap" * doctest::timeout(60)) {
  for (int m = 8; m <= 9; ++m) {
    std::uint64_t count = 0;
    graphs::for_each_tree(m, [&](const LabeledTree&) {
      ++count;
      return true;
    });
    std::uint64_t expect = 1;
    for (int k = 0; k < m - 2; ++k) expect *= static_cast<std::uint64_t>(m);
    CHECK(count == expect);
  }
}

TEST_CASE("streams stop early when asked") {
  int seen = 0;
  graphs::for_each_connected_graph(5, [&](const LabeledGraph&) { return ++seen < 7; });
  CHECK(seen == 7);
  seen = 0;
  graphs::for_each_tree(6, [&](const LabeledTree&) { return ++seen < 5; });
  CHECK(seen == 5);
}

TEST_CASE("connected graph stream is deterministic, unique, sorted, and connected") {
  const auto graphs1 = graphs::enumerate_connected_graphs(4);
  const auto graphs2 = graphs::enumerate_connected_graphs(4);
  CHECK(graphs1 == graphs2);

  std::set<std::vector<std::pair<int, int>>> seen;
  for (const auto& g : graphs1) {
    CHECK_NOTHROW(graphs::validate(g));
    CHECK(graphs::is_connected(g.n, g.edges));
    CHECK(seen.insert(g.edges).second);
  }
  // lexicographic order of sorted edge lists
  auto it = seen.begin();
  for (const auto& g : graphs1) CHECK(g.edges == *it++);
}

TEST_CASE("enumeration caps raise capacity errors") {
  CHECK_THROWS_AS(graphs::for_each_connected_graph(9, [](const LabeledGraph&) { return true; }),
                  CapacityError);
  CHECK_THROWS_AS(graphs::for_each_tree(10, [](const LabeledTree&) { return true; }),
                  CapacityError);
}

TEST_CASE("tree enumeration counts follow the n^(n-2) law") {
  CHECK(graphs::enumerate_trees(2, false).size() == 1);
  CHECK(graphs::enumerate_trees(3, false).size() == 3);
  CHECK(graphs::enumerate_trees(3, true).size() == 16);
  for (int m = 2; m <= 7; ++m) {
    std::uint64_t expect = 1;
    for (int k = 0; k < m - 2; ++k) expect *= static_cast<std::uint64_t>(m);
    CHECK(graphs::trees_on(m).size() == expect);
  }
}

TEST_CASE("every enumerated tree is a tree, exactly once") {
  std::set<std::vector<std::pair<int, int>>> seen;
  for (const auto& t : graphs::trees_on(5)) {
    CHECK_NOTHROW(graphs::validate(t));
    CHECK(seen.insert(t.edges).second);
  }
}

TEST_CASE("planar drawing of the first reference tree") {
  // edges {0,3},{1,3},{2,3},{1,4}: root-child 3, below it 1 then 2, and 4
  // hanging under 1.
  LabeledTree t{5, {{0, 3}, {1, 3}, {1, 4}, {2, 3}}};
  const auto drawing = graphs::to_planar_rooted(t);
  CHECK(drawing.vertex_count() == 5);
  CHECK(drawing.children[0] == std::vector<int>{1});
  CHECK(drawing.children[1] == std::vector<int>{2, 4});
  CHECK(drawing.children[2] == std::vector<int>{3});
  CHECK(drawing.children[3].empty());
  CHECK(drawing.children[4].empty());
  CHECK(graphs::preimage_count(drawing) == 12);
  CHECK(graphs::to_string(drawing) == "(((())()))");
}

TEST_CASE("distinct drawings from trees with the same shape multiset") {
  LabeledTree b{5, {{0, 2}, {0, 3}, {1, 2}, {2, 4}}};
  LabeledTree c{5, {{0, 2}, {0, 4}, {1, 4}, {3, 4}}};
  const auto db = graphs::to_planar_rooted(b);
  const auto dc = graphs::to_planar_rooted(c);
  CHECK(db != dc);
  // first drawing branches at the upper child, second at the lower child
  CHECK(db.children[0].size() == 2);
  CHECK(dc.children[0].size() == 2);
  CHECK(db.children[1].size() == 2);
  CHECK(dc.children[1].empty());
}

TEST_CASE("single edge drawing") {
  LabeledTree t{2, {{0, 1}}};
  const auto drawing = graphs::to_planar_rooted(t);
  CHECK(drawing.branching_factor(0) == 1);
  CHECK(drawing.branching_factor(1) == 0);
}

TEST_CASE("drawing is deterministic") {
  for (const auto& t : graphs::trees_on(5))
    CHECK(graphs::to_planar_rooted(t) == graphs::to_planar_rooted(t));
}

TEST_CASE("preimage counts: chains and stars") {
  // chain 0-1-2-...-n: every branching factor is 1, so the count is n!
  for (int n = 1; n <= 6; ++n) {
    graphs::PlanarRootedTree chain;
    chain.children.resize(static_cast<std::size_t>(n) + 1);
    for (int v = 0; v < n; ++v) chain.children[static_cast<std::size_t>(v)] = {v + 1};
    std::uint64_t expect = 1;
    for (int k = 2; k <= n; ++k) expect *= static_cast<std::uint64_t>(k);
    CHECK(graphs::preimage_count(chain) == expect);
  }
  // star: all n children under the root
  graphs::PlanarRootedTree star;
  star.children.resize(7);
  star.children[0] = {1, 2, 3, 4, 5, 6};
  CHECK(graphs::preimage_count(star) == 1);
}

TEST_CASE("preimage count overflow is detected") {
  graphs::PlanarRootedTree chain;
  const int n = 30;
  chain.children.resize(static_cast<std::size_t>(n) + 1);
  for (int v = 0; v < n; ++v) chain.children[static_cast<std::size_t>(v)] = {v + 1};
  CHECK_THROWS_AS(graphs::preimage_count(chain), std::overflow_error);
}

TEST_CASE("drawing classes partition the rooted trees with the stated sizes") {
  for (int n = 2; n <= 5; ++n) {
    std::map<std::string, std::pair<std::uint64_t, graphs::PlanarRootedTree>> classes;
    const auto all = graphs::enumerate_trees(n, true);
    for (const auto& t : all) {
      auto drawing = graphs::to_planar_rooted(t);
      auto key = graphs::to_string(drawing);
      auto [it, fresh] = classes.try_emplace(key, 0, drawing);
      ++it->second.first;
      if (!fresh) CHECK(it->second.second == drawing);
    }
    std::uint64_t total = 0;
    for (const auto& [key, entry] : classes) {
      CHECK(entry.first == graphs::preimage_count(entry.second));
      total += entry.first;
    }
    CHECK(total == all.size());
  }
}

TEST_CASE("graph validation rejects malformed input") {
  CHECK_THROWS_AS(graphs::validate(LabeledGraph{3, {{1, 1}}}), std::invalid_argument);
  CHECK_THROWS_AS(graphs::validate(LabeledGraph{3, {{0, 3}}}), std::invalid_argument);
  CHECK_THROWS_AS(graphs::validate(LabeledGraph{3, {{1, 2}, {0, 1}}}), std::invalid_argument);
  CHECK_THROWS_AS(graphs::validate(LabeledTree{3, {{0, 1}}}), std::invalid_argument);
  CHECK_THROWS_AS(graphs::validate(LabeledTree{4, {{0, 1}, {0, 2}, {1, 2}}}),
                  std::invalid_argument);
}
