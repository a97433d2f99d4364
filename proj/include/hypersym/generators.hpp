#pragma once

// Deterministic fixture generators: the small structured hypergraphs the
// test and verification suites revolve around, a seeded random-hypergraph
// sampler, and the n <= 8 corpus used for exhaustive oracle checks.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hypersym/core.hpp"
#include "hypersym/rng.hpp"

namespace hypersym {

// All 3-subsets of k vertices.
inline Hypergraph complete_3_uniform(int k) {
  std::vector<std::vector<int>> edges;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (int c = b + 1; c < k; ++c) edges.push_back({a, b, c});
  return build(k, std::move(edges));
}

// Cyclic 3-uniform hypergraph: edges {i, i+1, i+2} mod k. 3-regular and
// 3-uniform for every k >= 4 (k = 4 coincides with complete_3_uniform(4)).
inline Hypergraph hypercycle_3_uniform(int k) {
  std::vector<std::vector<int>> edges;
  for (int i = 0; i < k; ++i) edges.push_back({i, (i + 1) % k, (i + 2) % k});
  return build(k, std::move(edges));
}

inline Hypergraph cycle_graph(int k) {
  std::vector<std::vector<int>> edges;
  for (int i = 0; i < k; ++i) edges.push_back({i, (i + 1) % k});
  return build(k, std::move(edges));
}

inline Hypergraph path_graph(int k) {
  std::vector<std::vector<int>> edges;
  for (int i = 0; i + 1 < k; ++i) edges.push_back({i, i + 1});
  return build(k, std::move(edges));
}

// Vertex 0 is the center.
inline Hypergraph star_graph(int leaves) {
  std::vector<std::vector<int>> edges;
  for (int i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return build(leaves + 1, std::move(edges));
}

inline Hypergraph complete_graph(int k) {
  std::vector<std::vector<int>> edges;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) edges.push_back({a, b});
  return build(k, std::move(edges));
}

// One hyperedge spanning all k vertices.
inline Hypergraph single_hyperedge(int k) {
  std::vector<int> e(k);
  std::iota(e.begin(), e.end(), 0);
  return build(k, {e});
}

// Triangle with its 3-cycle boundary: {0,1},{1,2},{0,2},{0,1,2}. Has the
// same clique expansion support as the bare triangle but different
// refinement colors.
inline Hypergraph filled_triangle() {
  return build(3, {{0, 1}, {1, 2}, {0, 2}, {0, 1, 2}});
}

inline Hypergraph triangle() { return build(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline Hypergraph path_hypergraph() { return build(3, {{0, 1}, {1, 2}}); }

// Seeded random hypergraph: m hyperedges with sizes in [2, max_size],
// resampled until connected when requested (n small enough that this
// terminates quickly). Isolated vertices are allowed when connectivity is
// not requested.
inline Hypergraph random_hypergraph(int n, int m, int max_size, Rng& rng,
                                    bool require_connected = true) {
  if (n < 2) throw std::invalid_argument("random_hypergraph needs n >= 2");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::vector<int>> edges;
    edges.reserve(m);
    for (int e = 0; e < m; ++e) {
      const int size = 2 + static_cast<int>(rng.below(std::max(1, std::min(max_size, n) - 1)));
      std::vector<int> pool(n);
      std::iota(pool.begin(), pool.end(), 0);
      for (int i = 0; i < size; ++i) {
        std::swap(pool[i], pool[i + rng.below(n - i)]);
      }
      edges.push_back(std::vector<int>(pool.begin(), pool.begin() + size));
    }
    Hypergraph h = build(n, std::move(edges));
    if (h.m() == 0) continue;  // all candidates collapsed to duplicates
    if (!require_connected || is_connected(h)) return h;
  }
  throw std::runtime_error("random_hypergraph failed to produce a connected instance");
}

struct NamedHypergraph {
  std::string name;
  Hypergraph hypergraph;
};

// Fixture corpus with n <= 8: regular families, paths/stars/cycles,
// disjoint unions, and seeded random instances. Small enough for the
// brute-force automorphism oracle, wide enough to exercise every module.
inline std::vector<NamedHypergraph> corpus_n8() {
  std::vector<NamedHypergraph> corpus;
  const auto add = [&corpus](std::string name, Hypergraph h) {
    corpus.push_back({std::move(name), std::move(h)});
  };
  for (int k = 2; k <= 8; ++k) add("path_" + std::to_string(k), path_graph(k));
  for (int k = 3; k <= 8; ++k) add("cycle_" + std::to_string(k), cycle_graph(k));
  for (int k = 2; k <= 7; ++k) add("star_" + std::to_string(k), star_graph(k));
  for (int k = 3; k <= 6; ++k) add("complete_" + std::to_string(k), complete_graph(k));
  for (int k = 4; k <= 6; ++k) add("complete3u_" + std::to_string(k), complete_3_uniform(k));
  for (int k = 5; k <= 8; ++k) add("hypercycle3_" + std::to_string(k), hypercycle_3_uniform(k));
  for (int k = 2; k <= 8; ++k) add("edge_" + std::to_string(k), single_hyperedge(k));
  add("filled_triangle", filled_triangle());
  add("cycles_3_4", disjoint_union(cycle_graph(3), cycle_graph(4)));
  add("cycles_3_5", disjoint_union(cycle_graph(3), cycle_graph(5)));
  add("cycles_4_4", disjoint_union(cycle_graph(4), cycle_graph(4)));
  add("paths_2_2", disjoint_union(path_graph(2), path_graph(2)));
  add("paths_3_4", disjoint_union(path_graph(3), path_graph(4)));
  add("complete3u4_cycle4", disjoint_union(complete_3_uniform(4), cycle_graph(4)));
  add("edge3_edge3", disjoint_union(single_hyperedge(3), single_hyperedge(3)));
  add("triangle_edge2", disjoint_union(triangle(), path_graph(2)));
  Rng rng(0x5eedc0de);
  for (int i = 0; i < 12; ++i) {
    const int n = 4 + static_cast<int>(rng.below(5));  // 4..8
    const int m = 3 + static_cast<int>(rng.below(6));  // 3..8
    add("random_" + std::to_string(i), random_hypergraph(n, m, 4, rng));
  }
  return corpus;
}

// Random 3-uniform hypergraph with roughly the requested number of
// incidences (nnz), at an average degree of 6. Used by the scaling
// benchmark.
inline Hypergraph random_3_uniform_with_nnz(std::int64_t target_nnz, Rng& rng) {
  const int m = static_cast<int>(target_nnz / 3);
  const int n = std::max(4, static_cast<int>(target_nnz / 6));
  std::vector<std::vector<int>> edges;
  edges.reserve(m);
  for (int e = 0; e < m; ++e) {
    int a = static_cast<int>(rng.below(n));
    int b = static_cast<int>(rng.below(n));
    int c = static_cast<int>(rng.below(n));
    while (b == a) b = static_cast<int>(rng.below(n));
    while (c == a || c == b) c = static_cast<int>(rng.below(n));
    edges.push_back({a, b, c});
  }
  return build(n, std::move(edges));
}

}  // namespace hypersym
