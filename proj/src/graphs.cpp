#include "polygas/graphs.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "polygas/errors.hpp"

namespace polygas::graphs {

namespace {

std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

// Union-find over at most max_tree_vertices vertices, copied by value down
// the enumeration recursion so backtracking is a no-op.
struct MiniForest {
  std::array<std::int8_t, max_tree_vertices> parent{};
  int components = 0;

  void reset(int n) {
    components = n;
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(i);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  // Returns false when the edge closes a cycle.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = static_cast<std::int8_t>(b);
    --components;
    return true;
  }
};

void check_vertex_range(const std::vector<std::pair<int, int>>& edges, int n) {
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("edge endpoint out of range");
    if (i == j) throw std::invalid_argument("self-loop");
  }
}

void check_sorted_unique(const std::vector<std::pair<int, int>>& edges) {
  for (auto [i, j] : edges)
    if (i >= j) throw std::invalid_argument("edges must be stored as (i, j) with i < j");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k - 1] < edges[k])) throw std::invalid_argument("edges must be sorted and unique");
}

}  // namespace

void validate(const LabeledGraph& g) {
  if (g.n < 1) throw std::invalid_argument("graph needs at least one vertex");
  check_vertex_range(g.edges, g.n);
  check_sorted_unique(g.edges);
}

void validate(const LabeledTree& t) {
  if (t.n < 1) throw std::invalid_argument("tree needs at least one vertex");
  check_vertex_range(t.edges, t.n);
  check_sorted_unique(t.edges);
  if (static_cast<int>(t.edges.size()) != t.n - 1)
    throw std::invalid_argument("tree must have n-1 edges");
  if (!is_connected(t.n, t.edges)) throw std::invalid_argument("tree must be connected");
}

bool is_connected(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n <= 0) return false;
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = n;
  for (auto [i, j] : edges) {
    int a = find(i), b = find(j);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

void for_each_connected_graph(int n, const std::function<bool(const LabeledGraph&)>& visit) {
  if (n < 1) throw std::invalid_argument("vertex count must be positive");
  if (n > max_graph_vertices)
    throw CapacityError("connected-graph enumeration capped at " + std::to_string(max_graph_vertices) +
                        " vertices, got " + std::to_string(n));
  const auto pairs = all_pairs(n);
  const int m = static_cast<int>(pairs.size());

  LabeledGraph g;
  g.n = n;
  g.edges.reserve(pairs.size());

  // Preorder walk over edge subsets: visiting a set before its supersets
  // yields subsets exactly in lexicographic order of sorted edge lists.
  bool stop = false;
  auto rec = [&](auto&& self, int next, const MiniForest& forest) -> void {
    if (stop) return;
    if (forest.components == 1) {
      if (!visit(g)) {
        stop = true;
        return;
      }
    }
    for (int e = next; e < m && !stop; ++e) {
      MiniForest child = forest;
      child.unite(pairs[static_cast<std::size_t>(e)].first, pairs[static_cast<std::size_t>(e)].second);
      g.edges.push_back(pairs[static_cast<std::size_t>(e)]);
      self(self, e + 1, child);
      g.edges.pop_back();
    }
  };
  MiniForest root;
  root.reset(n);
  rec(rec, 0, root);
}

std::vector<LabeledGraph> enumerate_connected_graphs(int n) {
  std::vector<LabeledGraph> out;
  for_each_connected_graph(n, [&](const LabeledGraph& g) {
    out.push_back(g);
    return true;
  });
  return out;
}

void for_each_tree(int m, const std::function<bool(const LabeledTree&)>& visit) {
  if (m < 1) throw std::invalid_argument("vertex count must be positive");
  if (m > max_tree_vertices)
    throw CapacityError("tree enumeration capped at " + std::to_string(max_tree_vertices) +
                        " vertices, got " + std::to_string(m));
  const auto pairs = all_pairs(m);
  const int e_total = static_cast<int>(pairs.size());
  const int want = m - 1;

  LabeledTree t;
  t.n = m;
  t.edges.reserve(static_cast<std::size_t>(want));

  if (want == 0) {
    visit(t);
    return;
  }

  // Lexicographic combinations of edge indices, kept acyclic as we go; a
  // full acyclic selection of m-1 edges is automatically spanning.
  bool stop = false;
  auto rec = [&](auto&& self, int next, const MiniForest& forest, int chosen) -> void {
    if (stop) return;
    if (chosen == want) {
      if (!visit(t)) stop = true;
      return;
    }
    for (int e = next; e <= e_total - (want - chosen) && !stop; ++e) {
      MiniForest child = forest;
      if (!child.unite(pairs[static_cast<std::size_t>(e)].first, pairs[static_cast<std::size_t>(e)].second))
        continue;
      t.edges.push_back(pairs[static_cast<std::size_t>(e)]);
      self(self, e + 1, child, chosen + 1);
      t.edges.pop_back();
    }
  };
  MiniForest root;
  root.reset(m);
  rec(rec, 0, root, 0);
}

std::vector<LabeledTree> trees_on(int m) {
  std::vector<LabeledTree> out;
  for_each_tree(m, [&](const LabeledTree& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

std::vector<LabeledTree> enumerate_trees(int n, bool include_root_zero) {
  return trees_on(include_root_zero ? n + 1 : n);
}

PlanarRootedTree to_planar_rooted(const LabeledTree& tree) {
  validate(tree);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(tree.n));
  for (auto [i, j] : tree.edges) {
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  PlanarRootedTree out;
  out.children.reserve(static_cast<std::size_t>(tree.n));
  // Preorder renumbering; neighbors are already sorted, so descendants come
  // out ordered by increasing original label.
  auto rec = [&](auto&& self, int v, int parent) -> int {
    const int id = static_cast<int>(out.children.size());
    out.children.emplace_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (w == parent) continue;
      out.children[static_cast<std::size_t>(id)].push_back(self(self, w, v));
    }
    return id;
  };
  rec(rec, 0, -1);
  return out;
}

std::uint64_t preimage_count(const PlanarRootedTree& t) {
  if (t.vertex_count() < 1) throw std::invalid_argument("empty planar rooted tree");
  const int n = t.vertex_count() - 1;  // non-root vertices
  std::uint64_t numerator = 1;
  for (int k = 2; k <= n; ++k)
    if (__builtin_mul_overflow(numerator, static_cast<std::uint64_t>(k), &numerator))
      throw std::overflow_error("preimage count exceeds 64 bits");
  std::uint64_t denominator = 1;
  for (int v = 0; v < t.vertex_count(); ++v) {
    const int s = t.branching_factor(v);
    for (int k = 2; k <= s; ++k)
      if (__builtin_mul_overflow(denominator, static_cast<std::uint64_t>(k), &denominator))
        throw std::overflow_error("preimage count denominator exceeds 64 bits");
  }
  return numerator / denominator;  // exact: the multinomial is an integer
}

std::string to_string(const PlanarRootedTree& t) {
  std::string out;
  auto rec = [&](auto&& self, int v) -> void {
    out.push_back('(');
    for (int c : t.children[static_cast<std::size_t>(v)]) self(self, c);
    out.push_back(')');
  };
  rec(rec, 0);
  return out;
}

}  // namespace polygas::graphs
