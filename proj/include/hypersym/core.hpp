#pragma once

// Sparse hypergraph representation and basic structure operations:
// dual-indexed incidence (the nonzeros of the star expansion matrix H),
// bipartite star expansion, weighted clique expansion, induced
// subhypergraphs, connected components, the permutation action with its
// stabilizer test, and the random-walk stationary distribution.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hypersym {

struct BuildStats {
  int dropped_small = 0;      // empty or singleton hyperedges removed
  int merged_duplicates = 0;  // equal-as-set hyperedges collapsed
};

// Immutable once built. `edges` is canonical: every hyperedge is a sorted,
// duplicate-free vertex-id list, and the edge list itself is sorted
// lexicographically. `vertex_incidence` is the exact transpose of `edges`.
struct Hypergraph {
  int n = 0;
  std::vector<std::vector<int>> edges;
  std::vector<std::vector<int>> vertex_incidence;
  std::vector<int> edge_sizes;
  std::int64_t nnz = 0;  // sum of edge sizes

  int m() const { return static_cast<int>(edges.size()); }
};

inline bool operator==(const Hypergraph& a, const Hypergraph& b) {
  return a.n == b.n && a.edges == b.edges;
}

inline Hypergraph build(int n, std::vector<std::vector<int>> raw_edges,
                        BuildStats* stats = nullptr) {
  if (n < 0) throw std::invalid_argument("vertex count must be nonnegative");
  BuildStats local;
  std::vector<std::vector<int>> canonical;
  canonical.reserve(raw_edges.size());
  for (std::size_t i = 0; i < raw_edges.size(); ++i) {
    std::vector<int>& e = raw_edges[i];
    for (int v : e) {
      if (v < 0 || v >= n) {
        throw std::invalid_argument("hyperedge " + std::to_string(i) +
                                    " contains vertex id " + std::to_string(v) +
                                    " outside [0, " + std::to_string(n) + ")");
      }
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.size() < 2) {
      ++local.dropped_small;
      continue;
    }
    canonical.push_back(std::move(e));
  }
  std::sort(canonical.begin(), canonical.end());
  auto last = std::unique(canonical.begin(), canonical.end());
  local.merged_duplicates = static_cast<int>(canonical.end() - last);
  canonical.erase(last, canonical.end());

  Hypergraph h;
  h.n = n;
  h.edges = std::move(canonical);
  h.vertex_incidence.assign(n, {});
  h.edge_sizes.reserve(h.edges.size());
  for (int e = 0; e < h.m(); ++e) {
    h.edge_sizes.push_back(static_cast<int>(h.edges[e].size()));
    h.nnz += h.edge_sizes.back();
    for (int v : h.edges[e]) h.vertex_incidence[v].push_back(e);
  }
  if (stats) *stats = local;
  return h;
}

inline void check_vertex(const Hypergraph& h, int v) {
  if (v < 0 || v >= h.n) {
    throw std::invalid_argument("vertex id " + std::to_string(v) +
                                " outside [0, " + std::to_string(h.n) + ")");
  }
}

inline int degree(const Hypergraph& h, int v) {
  check_vertex(h, v);
  return static_cast<int>(h.vertex_incidence[v].size());
}

inline std::int64_t volume(const Hypergraph& h, int v) {
  check_vertex(h, v);
  std::int64_t total = 0;
  for (int e : h.vertex_incidence[v]) total += h.edge_sizes[e];
  return total;
}

// ---------------------------------------------------------------------------
// Star expansion

// Bipartite view of H: red nodes are vertices (left), blue nodes are
// hyperedges (right); (v, e) is an edge iff v is a member of e.
struct BipartiteGraph {
  int left = 0;
  int right = 0;
  std::vector<std::vector<int>> left_adj;   // vertex -> incident hyperedges
  std::vector<std::vector<int>> right_adj;  // hyperedge -> member vertices
};

inline BipartiteGraph star_expansion(const Hypergraph& h) {
  BipartiteGraph b;
  b.left = h.n;
  b.right = h.m();
  b.left_adj = h.vertex_incidence;
  b.right_adj = h.edges;
  return b;
}

// ---------------------------------------------------------------------------
// Clique expansion

// Weighted vertex adjacency A[u][v] = sum over shared hyperedges of 1/|e|,
// diagonal included. Returned as sorted sparse rows.
using SparseRow = std::vector<std::pair<int, double>>;

inline std::vector<SparseRow> clique_expansion(const Hypergraph& h) {
  std::vector<SparseRow> rows(h.n);
  for (int u = 0; u < h.n; ++u) {
    std::vector<std::pair<int, double>> entries;
    for (int e : h.vertex_incidence[u]) {
      const double w = 1.0 / h.edge_sizes[e];
      for (int v : h.edges[e]) entries.emplace_back(v, w);
    }
    std::sort(entries.begin(), entries.end());
    SparseRow& row = rows[u];
    for (const auto& [v, w] : entries) {
      if (!row.empty() && row.back().first == v) {
        row.back().second += w;
      } else {
        row.emplace_back(v, w);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Induced subhypergraphs

struct InducedSubhypergraph {
  Hypergraph hypergraph;
  std::vector<int> to_original;    // new vertex id -> original id
  std::vector<int> from_original;  // original id -> new id, -1 if absent
  std::vector<int> edge_origin;    // new edge id -> original edge id
};

// Keeps exactly the hyperedges fully contained in `w`; vertex ids are
// compacted preserving order.
inline InducedSubhypergraph induced_subhypergraph(const Hypergraph& h,
                                                  std::vector<int> w) {
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  for (int v : w) check_vertex(h, v);

  InducedSubhypergraph out;
  out.from_original.assign(h.n, -1);
  out.to_original = w;
  for (std::size_t i = 0; i < w.size(); ++i) out.from_original[w[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> kept;
  for (int e = 0; e < h.m(); ++e) {
    bool inside = true;
    for (int v : h.edges[e]) {
      if (out.from_original[v] < 0) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    std::vector<int> mapped;
    mapped.reserve(h.edges[e].size());
    for (int v : h.edges[e]) mapped.push_back(out.from_original[v]);
    kept.push_back(std::move(mapped));
    out.edge_origin.push_back(e);
  }
  // Mapped edges stay sorted (the remap is monotone), and distinct edges stay
  // distinct, so build() preserves their relative order and edge_origin
  // remains aligned.
  out.hypergraph = build(static_cast<int>(w.size()), std::move(kept));
  return out;
}

// ---------------------------------------------------------------------------
// Connected components

struct ComponentPartition {
  std::vector<int> vertex_component;  // vertex -> component id
  std::vector<int> edge_component;    // hyperedge -> component id
  int count = 0;
};

// BFS over the star expansion. Component ids are assigned in increasing
// order of the smallest contained vertex id, so the labeling is
// deterministic and independent of traversal details. Isolated vertices form
// singleton components.
inline ComponentPartition connected_components(const Hypergraph& h) {
  ComponentPartition out;
  out.vertex_component.assign(h.n, -1);
  out.edge_component.assign(h.m(), -1);
  std::vector<int> queue;
  for (int start = 0; start < h.n; ++start) {
    if (out.vertex_component[start] >= 0) continue;
    const int id = out.count++;
    out.vertex_component[start] = id;
    queue.assign(1, start);
    while (!queue.empty()) {
      const int u = queue.back();
      queue.pop_back();
      for (int e : h.vertex_incidence[u]) {
        if (out.edge_component[e] >= 0) continue;
        out.edge_component[e] = id;
        for (int v : h.edges[e]) {
          if (out.vertex_component[v] < 0) {
            out.vertex_component[v] = id;
            queue.push_back(v);
          }
        }
      }
    }
  }
  return out;
}

inline bool is_connected(const Hypergraph& h) {
  return h.n <= 1 || connected_components(h).count == 1;
}

// ---------------------------------------------------------------------------
// Permutation action

struct Permutation {
  std::vector<int> mapping;  // v -> pi(v)

  int size() const { return static_cast<int>(mapping.size()); }
  int operator()(int v) const { return mapping[v]; }
};

inline Permutation make_permutation(std::vector<int> mapping) {
  std::vector<int> sorted = mapping;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i)) {
      throw std::invalid_argument("mapping is not a bijection on 0.." +
                                  std::to_string(mapping.size() - 1));
    }
  }
  return Permutation{std::move(mapping)};
}

inline Permutation identity_permutation(int n) {
  std::vector<int> mapping(n);
  std::iota(mapping.begin(), mapping.end(), 0);
  return Permutation{std::move(mapping)};
}

inline Permutation inverse(const Permutation& p) {
  std::vector<int> inv(p.mapping.size());
  for (int v = 0; v < p.size(); ++v) inv[p.mapping[v]] = v;
  return Permutation{std::move(inv)};
}

// compose(a, b) maps v to a(b(v)).
inline Permutation compose(const Permutation& a, const Permutation& b) {
  std::vector<int> mapping(b.mapping.size());
  for (int v = 0; v < b.size(); ++v) mapping[v] = a.mapping[b.mapping[v]];
  return Permutation{std::move(mapping)};
}

inline Hypergraph apply_permutation(const Hypergraph& h, const Permutation& p) {
  if (p.size() != h.n) {
    throw std::invalid_argument("permutation size " + std::to_string(p.size()) +
                                " does not match vertex count " + std::to_string(h.n));
  }
  std::vector<std::vector<int>> mapped = h.edges;
  for (auto& e : mapped) {
    for (int& v : e) v = p.mapping[v];
  }
  return build(h.n, std::move(mapped));
}

inline bool is_stabilizer(const Hypergraph& h, const Permutation& p) {
  return apply_permutation(h, p).edges == h.edges;
}

// ---------------------------------------------------------------------------
// Stationary distribution

struct StationaryDistribution {
  std::vector<double> probs;
};

// Closed form pi(v) = deg(v) / sum_u deg(u) for the hypergraph random walk
// (pick an incident hyperedge, then a member vertex uniformly). Valid as the
// unique stationary distribution only on connected hypergraphs, hence the
// connectivity requirement.
inline StationaryDistribution stationary_distribution(const Hypergraph& h) {
  if (h.m() == 0) throw std::invalid_argument("stationary distribution needs at least one hyperedge");
  if (!is_connected(h)) throw std::invalid_argument("stationary distribution requires a connected hypergraph");
  StationaryDistribution out;
  out.probs.resize(h.n);
  const double total = static_cast<double>(h.nnz);
  for (int v = 0; v < h.n; ++v) {
    out.probs[v] = static_cast<double>(h.vertex_incidence[v].size()) / total;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Disjoint union (second operand's vertex ids shifted by a.n; its edge ids
// follow a's in the canonical order). Used to compare refinement colors
// across hypergraphs.

inline Hypergraph disjoint_union(const Hypergraph& a, const Hypergraph& b) {
  std::vector<std::vector<int>> edges = a.edges;
  edges.reserve(a.edges.size() + b.edges.size());
  for (const auto& e : b.edges) {
    std::vector<int> shifted;
    shifted.reserve(e.size());
    for (int v : e) shifted.push_back(v + a.n);
    edges.push_back(std::move(shifted));
  }
  return build(a.n + b.n, std::move(edges));
}

}  // namespace hypersym
