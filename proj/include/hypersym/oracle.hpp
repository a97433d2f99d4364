#pragma once

// Exact verification oracles, deliberately brute force:
//  - finite-depth unrolling of the 2-colored universal cover of the star
//    expansion, with AHU-style canonical rooted-tree codes,
//  - the duality check between refinement colors and rooted-tree codes,
//  - full Sym(V) enumeration for automorphism orbits, k-set isomorphism,
//    hypergraph isomorphism, and neighborhood regularity.
// These exist to certify the fast implementations on small instances; none
// of them prunes or approximates.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hypersym/core.hpp"
#include "hypersym/refine.hpp"

namespace hypersym {

// ---------------------------------------------------------------------------
// Universal-cover unrolling

// Nodes alternate red (vertex lifts, carrying the attribute label) and blue
// (hyperedge lifts, label -1). Children always have larger indices than
// their parent (breadth-first construction), which code computation relies
// on.
struct RootedColoredTree {
  struct Node {
    bool red = true;
    int label = -1;
    std::vector<int> children;
  };
  std::vector<Node> nodes;
  int root = 0;
  int depth = 0;
};

// Depth-k ball of the universal cover rooted at a lift of the given vertex
// (red_root) or hyperedge. Unrolling is non-backtracking at the bipartite
// level: a child never revisits its parent's underlying node, but longer
// cycles unroll into distinct lifts.
inline RootedColoredTree unroll(const BipartiteGraph& b, bool red_root, int root_index,
                                int depth, const NodeAttributes& x = {}) {
  const int side_count = red_root ? b.left : b.right;
  if (root_index < 0 || root_index >= side_count) {
    throw std::invalid_argument("unroll root " + std::to_string(root_index) + " out of range");
  }
  if (depth < 0) throw std::invalid_argument("unroll depth must be >= 0");
  if (!x.classes.empty() && static_cast<int>(x.classes.size()) != b.left) {
    throw std::invalid_argument("attribute vector length does not match vertex count");
  }
  const auto label_of = [&x](int v) { return x.classes.empty() ? 0 : x.classes[v]; };

  RootedColoredTree tree;
  tree.depth = depth;
  struct Frontier {
    int tree_node;
    bool red;
    int index;
    int parent_index;  // underlying index on the other side, -1 at the root
  };
  tree.nodes.push_back({red_root, red_root ? label_of(root_index) : -1, {}});
  std::vector<Frontier> frontier{{0, red_root, root_index, -1}};
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<Frontier> next;
    for (const Frontier& f : frontier) {
      const std::vector<int>& nbrs = f.red ? b.left_adj[f.index] : b.right_adj[f.index];
      for (int other : nbrs) {
        if (other == f.parent_index) continue;
        const int child = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({!f.red, f.red ? -1 : label_of(other), {}});
        tree.nodes[f.tree_node].children.push_back(child);
        next.push_back({child, !f.red, other, f.index});
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

// AHU canonical codes: code(node) = intern(color, label, sorted child codes).
// Codes are comparable only within one book; equal codes iff the rooted
// 2-colored labeled trees are isomorphic.
class TreeCodeBook {
 public:
  int code(const RootedColoredTree& t) {
    std::vector<int> codes(t.nodes.size());
    for (int i = static_cast<int>(t.nodes.size()) - 1; i >= 0; --i) {
      const auto& node = t.nodes[i];
      std::vector<int> sig;
      sig.reserve(node.children.size() + 2);
      sig.push_back(node.red ? 1 : 0);
      sig.push_back(node.label);
      for (int c : node.children) sig.push_back(codes[c]);
      std::sort(sig.begin() + 2, sig.end());
      codes[i] = interner_.intern(std::move(sig));
    }
    return codes[t.root];
  }

 private:
  detail::SignatureInterner interner_;
};

inline int canonical_code(const RootedColoredTree& t, TreeCodeBook& book) {
  return book.code(t);
}

inline bool rooted_trees_isomorphic(const RootedColoredTree& a, const RootedColoredTree& b) {
  TreeCodeBook book;
  return book.code(a) == book.code(b);
}

// ---------------------------------------------------------------------------
// Duality between refinement colors and universal-cover balls

struct DualityCounterexample {
  bool edge_pair = false;  // false: a node pair, true: a hyperedge pair
  int first = -1;          // index in h1
  int second = -1;         // index in h2
  bool colors_equal = false;
  bool codes_equal = false;
  int iteration = 0;
};

struct DualityVerdict {
  bool pass = true;
  std::optional<DualityCounterexample> counterexample;
  std::int64_t pairs_checked = 0;
};

// Checks, for every cross pair, that iteration-i node colors coincide
// exactly when depth-2i node-rooted universal-cover balls are isomorphic,
// and iteration-i hyperedge colors coincide exactly when depth-(2i-1)
// hyperedge-rooted balls are. Colors are computed on the disjoint union so
// they are comparable across the two inputs.
inline DualityVerdict verify_duality(const Hypergraph& h1, const Hypergraph& h2, int i,
                                     const NodeAttributes& x1 = {}, const NodeAttributes& x2 = {}) {
  if (i < 1) throw std::invalid_argument("duality check needs iteration >= 1");
  if (!is_connected(h1) || !is_connected(h2)) {
    throw std::invalid_argument("duality check requires connected hypergraphs");
  }
  NodeAttributes joint;
  if (!x1.classes.empty() || !x2.classes.empty()) {
    joint.classes.resize(h1.n + h2.n, 0);
    for (int v = 0; v < h1.n; ++v) joint.classes[v] = x1.classes.empty() ? 0 : x1.classes[v];
    for (int v = 0; v < h2.n; ++v) joint.classes[h1.n + v] = x2.classes.empty() ? 0 : x2.classes[v];
  }
  const Hypergraph hu = disjoint_union(h1, h2);
  const ColorHistory ch = gwl1(hu, joint, i);
  const std::vector<int>& node_colors = ch.node_colors[i];
  const std::vector<int>& edge_colors = ch.edge_colors[i];

  const BipartiteGraph b1 = star_expansion(h1);
  const BipartiteGraph b2 = star_expansion(h2);
  TreeCodeBook book;

  std::vector<int> node_codes1(h1.n), node_codes2(h2.n);
  for (int v = 0; v < h1.n; ++v) node_codes1[v] = book.code(unroll(b1, true, v, 2 * i, x1));
  for (int v = 0; v < h2.n; ++v) node_codes2[v] = book.code(unroll(b2, true, v, 2 * i, x2));
  std::vector<int> edge_codes1(h1.m()), edge_codes2(h2.m());
  for (int e = 0; e < h1.m(); ++e) edge_codes1[e] = book.code(unroll(b1, false, e, 2 * i - 1, x1));
  for (int e = 0; e < h2.m(); ++e) edge_codes2[e] = book.code(unroll(b2, false, e, 2 * i - 1, x2));

  DualityVerdict verdict;
  for (int a = 0; a < h1.n; ++a) {
    for (int b = 0; b < h2.n; ++b) {
      ++verdict.pairs_checked;
      const bool colors_equal = node_colors[a] == node_colors[h1.n + b];
      const bool codes_equal = node_codes1[a] == node_codes2[b];
      if (colors_equal != codes_equal) {
        verdict.pass = false;
        verdict.counterexample = DualityCounterexample{false, a, b, colors_equal, codes_equal, i};
        return verdict;
      }
    }
  }
  for (int a = 0; a < h1.m(); ++a) {
    for (int b = 0; b < h2.m(); ++b) {
      ++verdict.pairs_checked;
      const bool colors_equal = edge_colors[a] == edge_colors[h1.m() + b];
      const bool codes_equal = edge_codes1[a] == edge_codes2[b];
      if (colors_equal != codes_equal) {
        verdict.pass = false;
        verdict.counterexample = DualityCounterexample{true, a, b, colors_equal, codes_equal, i};
        return verdict;
      }
    }
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Brute-force automorphism enumeration

struct OrbitPartition {
  std::vector<std::vector<int>> orbits;  // sorted within and by first element
  std::int64_t group_size = 0;
};

namespace detail {

inline void check_enumeration_cap(int n, int cap) {
  if (n > cap) {
    throw std::invalid_argument("refusing to enumerate Sym(V) for n = " + std::to_string(n) +
                                " > cap " + std::to_string(cap) +
                                "; raise the cap explicitly if the factorial cost is intended");
  }
}

// Applies the candidate permutation to every hyperedge and compares the
// canonical edge lists. Equivalent to is_stabilizer but avoids rebuilding
// the dual index inside the n! loop.
inline bool permutation_stabilizes(const Hypergraph& h, const std::vector<int>& perm,
                                   std::vector<std::vector<int>>& scratch) {
  scratch.clear();
  for (const auto& e : h.edges) {
    std::vector<int> mapped;
    mapped.reserve(e.size());
    for (int v : e) mapped.push_back(perm[v]);
    std::sort(mapped.begin(), mapped.end());
    scratch.push_back(std::move(mapped));
  }
  std::sort(scratch.begin(), scratch.end());
  return scratch == h.edges;
}

}  // namespace detail

inline std::vector<Permutation> enumerate_stabilizers(const Hypergraph& h, int cap = 8) {
  detail::check_enumeration_cap(h.n, cap);
  std::vector<Permutation> stabilizers;
  std::vector<int> perm(h.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> scratch;
  do {
    if (detail::permutation_stabilizes(h, perm, scratch)) {
      stabilizers.push_back(Permutation{perm});
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return stabilizers;
}

inline OrbitPartition automorphisms(const Hypergraph& h, int cap = 8) {
  const std::vector<Permutation> stabilizers = enumerate_stabilizers(h, cap);
  std::vector<int> parent(h.n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Permutation& p : stabilizers) {
    for (int v = 0; v < h.n; ++v) {
      const int a = find(v);
      const int b = find(p.mapping[v]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::unordered_map<int, std::vector<int>> grouped;
  for (int v = 0; v < h.n; ++v) grouped[find(v)].push_back(v);
  OrbitPartition out;
  out.group_size = static_cast<std::int64_t>(stabilizers.size());
  for (int v = 0; v < h.n; ++v) {
    auto it = grouped.find(v);
    if (it != grouped.end()) out.orbits.push_back(std::move(it->second));
  }
  return out;
}

// True iff some stabilizer exchanges the two vertex sets (maps s onto t and
// t onto s).
inline bool k_set_isomorphic(const Hypergraph& h, std::vector<int> s, std::vector<int> t,
                             int cap = 8) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  if (s.size() != t.size()) {
    throw std::invalid_argument("k-set isomorphism needs equal-size vertex sets");
  }
  for (int v : s) check_vertex(h, v);
  for (int v : t) check_vertex(h, v);
  const auto image = [](const Permutation& p, const std::vector<int>& set) {
    std::vector<int> mapped;
    mapped.reserve(set.size());
    for (int v : set) mapped.push_back(p.mapping[v]);
    std::sort(mapped.begin(), mapped.end());
    return mapped;
  };
  for (const Permutation& p : enumerate_stabilizers(h, cap)) {
    if (image(p, s) == t && image(p, t) == s) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Brute-force hypergraph isomorphism and neighborhood regularity

inline bool hypergraph_isomorphic(const Hypergraph& a, const Hypergraph& b, int cap = 8) {
  if (a.n != b.n || a.m() != b.m()) return false;
  std::vector<int> sizes_a = a.edge_sizes, sizes_b = b.edge_sizes;
  std::sort(sizes_a.begin(), sizes_a.end());
  std::sort(sizes_b.begin(), sizes_b.end());
  if (sizes_a != sizes_b) return false;
  detail::check_enumeration_cap(a.n, cap);
  std::vector<int> perm(a.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> scratch;
  do {
    scratch.clear();
    for (const auto& e : a.edges) {
      std::vector<int> mapped;
      mapped.reserve(e.size());
      for (int v : e) mapped.push_back(perm[v]);
      std::sort(mapped.begin(), mapped.end());
      scratch.push_back(std::move(mapped));
    }
    std::sort(scratch.begin(), scratch.end());
    if (scratch == b.edges) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// N(v) = (union of incident hyperedges, set of incident hyperedges),
// compacted to dense ids. deg(v) = 0 gives the empty hypergraph.
inline Hypergraph vertex_neighborhood(const Hypergraph& h, int v) {
  check_vertex(h, v);
  std::vector<int> support;
  for (int e : h.vertex_incidence[v]) {
    support.insert(support.end(), h.edges[e].begin(), h.edges[e].end());
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  std::vector<int> remap(h.n, -1);
  for (std::size_t i = 0; i < support.size(); ++i) remap[support[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> edges;
  edges.reserve(h.vertex_incidence[v].size());
  for (int e : h.vertex_incidence[v]) {
    std::vector<int> mapped;
    mapped.reserve(h.edges[e].size());
    for (int u : h.edges[e]) mapped.push_back(remap[u]);
    edges.push_back(std::move(mapped));
  }
  return build(static_cast<int>(support.size()), std::move(edges));
}

// All vertex neighborhoods pairwise isomorphic (checked against vertex 0's,
// which suffices since isomorphism is transitive).
inline bool neighborhood_regular(const Hypergraph& h, int cap = 8) {
  if (h.n <= 1) return true;
  const Hypergraph reference = vertex_neighborhood(h, 0);
  for (int v = 1; v < h.n; ++v) {
    if (!hypergraph_isomorphic(reference, vertex_neighborhood(h, v), cap)) return false;
  }
  return true;
}

}  // namespace hypersym
