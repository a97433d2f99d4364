#pragma once

// Symmetry finding: for each converged (or L-iteration) refinement color,
// take the subhypergraph induced by that color class, split it into
// connected components, and report every component with at least 3 vertices
// (the minimum size a nontrivial covering hyperedge needs). The optional
// degree-multiset guard additionally drops components whose degree multiset
// already matches an existing hyperedge's, so the cover attached later
// cannot alias an existing hyperedge class. Runs in O(L * nnz + n + m)
// modulo hashing.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hypersym/core.hpp"
#include "hypersym/refine.hpp"

namespace hypersym {

struct SymmetryComponent {
  int class_id = 0;             // refinement color shared by the vertices
  std::vector<int> vertex_set;  // sorted; an element of R_V
  std::vector<int> edge_ids;    // hyperedges fully inside; contribution to R_E
  int size = 0;
};

struct SymmetryReport {
  std::vector<SymmetryComponent> components;  // ordered by smallest vertex id
  int L_used = 0;                             // iteration whose colors were used
  bool guard_enabled = true;
  std::int64_t components_examined = 0;  // all class components, any size
};

inline SymmetryReport find_symmetries(const Hypergraph& h, const NodeAttributes& x, int L,
                                      bool guard = true, int threads = 1) {
  const ColorHistory ch = gwl1(h, x, L, threads);
  const int used = (L == kUntilConvergence) ? ch.iterations() : L;
  const std::vector<int>& colors = ch.node_colors[used];

  SymmetryReport report;
  report.L_used = used;
  report.guard_enabled = guard;

  // Hyperedges whose endpoints all share a color belong to that color's
  // induced subhypergraph; every other hyperedge belongs to none.
  const int m = h.m();
  std::vector<int> edge_class(m, -1);
  for (int e = 0; e < m; ++e) {
    const int c = colors[h.edges[e][0]];
    bool monochrome = true;
    for (int v : h.edges[e]) {
      if (colors[v] != c) {
        monochrome = false;
        break;
      }
    }
    if (monochrome) edge_class[e] = c;
  }

  // Union-find over vertices, joining only through same-class hyperedges;
  // vertices of different colors are never joined even when adjacent.
  std::vector<int> parent(h.n);
  for (int v = 0; v < h.n; ++v) parent[v] = v;
  const auto find = [&parent](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  // Linking toward the smaller id makes every root the smallest vertex of
  // its component, so components come out ordered by smallest vertex id.
  for (int e = 0; e < m; ++e) {
    if (edge_class[e] < 0) continue;
    int root = find(h.edges[e][0]);
    for (int v : h.edges[e]) {
      const int r = find(v);
      if (r == root) continue;
      const int lo = std::min(r, root);
      parent[std::max(r, root)] = lo;
      root = lo;
    }
  }

  std::optional<std::unordered_set<std::vector<int>, detail::IntVectorHash>> edge_degree_multisets;
  if (guard) {
    edge_degree_multisets.emplace();
    for (const auto& e : h.edges) {
      std::vector<int> degs;
      degs.reserve(e.size());
      for (int v : e) degs.push_back(static_cast<int>(h.vertex_incidence[v].size()));
      std::sort(degs.begin(), degs.end());
      edge_degree_multisets->insert(std::move(degs));
    }
  }

  // Group vertices by component root; scanning in vertex order makes the
  // resulting component order (by smallest vertex id) deterministic.
  std::vector<std::vector<int>> members(h.n);
  std::vector<int> roots;
  for (int v = 0; v < h.n; ++v) {
    const int r = find(v);
    if (members[r].empty()) roots.push_back(r);
    members[r].push_back(v);
  }
  report.components_examined = static_cast<std::int64_t>(roots.size());

  std::vector<std::vector<int>> component_edges(h.n);
  for (int e = 0; e < m; ++e) {
    if (edge_class[e] >= 0) component_edges[find(h.edges[e][0])].push_back(e);
  }

  for (int r : roots) {
    std::vector<int>& vertex_set = members[r];
    if (vertex_set.size() < 3) continue;
    if (guard) {
      std::vector<int> degs;
      degs.reserve(vertex_set.size());
      for (int v : vertex_set) degs.push_back(static_cast<int>(h.vertex_incidence[v].size()));
      std::sort(degs.begin(), degs.end());
      if (edge_degree_multisets->count(degs)) continue;
    }
    SymmetryComponent comp;
    comp.class_id = colors[vertex_set[0]];
    comp.size = static_cast<int>(vertex_set.size());
    comp.vertex_set = std::move(vertex_set);
    comp.edge_ids = std::move(component_edges[r]);
    report.components.push_back(std::move(comp));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Component statistics (per-dataset summary of what the finder saw)

struct StatsRow {
  std::string dataset;
  int n = 0;
  int m = 0;
  std::int64_t components = 0;  // components examined, any size
  double frac_ge3 = 0.0;        // reported / examined
  double mean_size = 0.0;       // over reported components
  double median_size = 0.0;
  int max_size = 0;
};

inline std::vector<StatsRow> component_statistics(const std::vector<SymmetryReport>& reports,
                                                  const std::vector<Hypergraph>& hs,
                                                  const std::vector<std::string>& names = {}) {
  if (reports.size() != hs.size() || (!names.empty() && names.size() != hs.size())) {
    throw std::invalid_argument("component_statistics needs parallel report/hypergraph lists");
  }
  std::vector<StatsRow> rows;
  rows.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    StatsRow row;
    row.dataset = names.empty() ? "dataset_" + std::to_string(i) : names[i];
    row.n = hs[i].n;
    row.m = hs[i].m();
    row.components = reports[i].components_examined;
    std::vector<int> sizes;
    sizes.reserve(reports[i].components.size());
    for (const auto& c : reports[i].components) sizes.push_back(c.size);
    if (row.components > 0) {
      row.frac_ge3 = static_cast<double>(sizes.size()) / static_cast<double>(row.components);
    }
    if (!sizes.empty()) {
      std::sort(sizes.begin(), sizes.end());
      std::int64_t total = 0;
      for (int s : sizes) total += s;
      row.mean_size = static_cast<double>(total) / static_cast<double>(sizes.size());
      const std::size_t half = sizes.size() / 2;
      row.median_size = (sizes.size() % 2 == 1)
                            ? sizes[half]
                            : (sizes[half - 1] + sizes[half]) / 2.0;
      row.max_size = sizes.back();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string stats_csv(const std::vector<StatsRow>& rows) {
  std::string out = "dataset,n,m,components,frac_ge3,mean_size,median_size,max_size\n";
  const auto fmt = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  for (const StatsRow& r : rows) {
    out += r.dataset + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," +
           std::to_string(r.components) + "," + fmt(r.frac_ge3) + "," + fmt(r.mean_size) + "," +
           fmt(r.median_size) + "," + std::to_string(r.max_size) + "\n";
  }
  return out;
}

}  // namespace hypersym
