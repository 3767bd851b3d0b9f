#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace polygas::graphs {

// Enumeration caps. Graph enumeration walks all edge subsets, so vertex
// counts beyond these are rejected with CapacityError.
inline constexpr int max_graph_vertices = 8;
inline constexpr int max_tree_vertices = 9;

// Simple undirected graph on vertices 0..n-1. Edges are stored as (i, j)
// with i < j, sorted lexicographically. No self-loops, no duplicates.
struct LabeledGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  bool operator==(const LabeledGraph&) const = default;
};

// A LabeledGraph that is additionally connected with exactly n-1 edges.
struct LabeledTree {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  bool operator==(const LabeledTree&) const = default;
};

// Throws std::invalid_argument when the respective invariants fail.
void validate(const LabeledGraph& g);
void validate(const LabeledTree& t);

bool is_connected(int n, const std::vector<std::pair<int, int>>& edges);

// All connected graphs on {0..n-1}, in lexicographic order of the sorted
// edge list. The callback may return false to stop early.
void for_each_connected_graph(int n, const std::function<bool(const LabeledGraph&)>& visit);
std::vector<LabeledGraph> enumerate_connected_graphs(int n);

// All labeled trees on {0..m-1}, in lexicographic order of the sorted edge
// list. enumerate_trees(n, include_root_zero) uses m = n + 1 vertices when
// the root flag is set (vertex 0 acting as the root) and m = n otherwise.
void for_each_tree(int m, const std::function<bool(const LabeledTree&)>& visit);
std::vector<LabeledTree> trees_on(int m);
std::vector<LabeledTree> enumerate_trees(int n, bool include_root_zero);

// Rooted tree with ordered descendant lists. Vertices are renumbered in
// preorder (root = 0), so structural equality of the children table is
// exactly equality of drawings; original labels are discarded.
struct PlanarRootedTree {
  std::vector<std::vector<int>> children;

  int vertex_count() const { return static_cast<int>(children.size()); }
  int branching_factor(int v) const { return static_cast<int>(children[v].size()); }

  bool operator==(const PlanarRootedTree&) const = default;
};

// Drawing of a tree rooted at vertex 0: at every vertex the descendants are
// ordered by increasing original label.
PlanarRootedTree to_planar_rooted(const LabeledTree& tree);

// Number of labeled trees mapping to this drawing: n! / prod_v s_v! over
// the n non-root vertices. Throws std::overflow_error when the computation
// leaves 64 bits.
std::uint64_t preimage_count(const PlanarRootedTree& t);

// Canonical text form, e.g. "(()(()))"; usable as a hash/grouping key.
std::string to_string(const PlanarRootedTree& t);

}  // namespace polygas::graphs
