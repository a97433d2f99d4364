#pragma once

// Color refinement. gwl1 runs the alternating hyperedge/node refinement on
// the star expansion:
//
//   f_e^{i+1} = (f_e^i, {{ h_v^i : v in e }})
//   h_v^{i+1} = (h_v^i, {{ f_e^{i+1} : e contains v }})
//
// wl1_clique runs classic WL-1 on the unweighted support graph of the
// clique expansion. Signatures are canonicalized per iteration by sorting
// the multiset part and interning the result into dense integer ids, so
// color ids are comparable only within one run; cross-hypergraph comparison
// is done by refining the disjoint union.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hypersym/core.hpp"

namespace hypersym {

struct NodeAttributes {
  std::vector<int> classes;  // empty means unattributed (all zero)
};

struct ColorHistory {
  std::vector<std::vector<int>> node_colors;  // [iteration][vertex]
  std::vector<std::vector<int>> edge_colors;  // [iteration][hyperedge]
  std::optional<int> converged_at;            // first iteration that refined nothing

  int iterations() const { return static_cast<int>(node_colors.size()) - 1; }
  const std::vector<int>& final_node_colors() const { return node_colors.back(); }
};

// Iteration budget value meaning "run until the joint partition stabilizes".
inline constexpr int kUntilConvergence = -1;

namespace detail {

struct IntVectorHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int x : v) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Assigns dense ids to signatures in first-encounter order over the element
// scan, which makes color ids deterministic for a given input.
class SignatureInterner {
 public:
  int intern(std::vector<int>&& signature) {
    auto [it, inserted] = table_.try_emplace(std::move(signature), static_cast<int>(table_.size()));
    return it->second;
  }
  int size() const { return static_cast<int>(table_.size()); }

 private:
  std::unordered_map<std::vector<int>, int, IntVectorHash> table_;
};

// Runs fn(begin, end) over [0, count) split across up to `threads` workers.
// Workers write disjoint ranges, so results do not depend on the thread
// count.
template <typename F>
void parallel_for(int count, int threads, F&& fn) {
  if (threads <= 1 || count < 4096) {
    fn(0, count);
    return;
  }
  const int workers = std::min(threads, (count + 4095) / 4096);
  const int chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

// Dense rank of the initial attribute values: nodes share color 0.. by
// the sorted order of distinct attribute values.
inline std::vector<int> initial_node_colors(const Hypergraph& h, const NodeAttributes& x) {
  if (x.classes.empty()) return std::vector<int>(h.n, 0);
  if (static_cast<int>(x.classes.size()) != h.n) {
    throw std::invalid_argument("attribute vector length " + std::to_string(x.classes.size()) +
                                " does not match vertex count " + std::to_string(h.n));
  }
  std::vector<int> distinct = x.classes;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> colors(h.n);
  for (int v = 0; v < h.n; ++v) {
    colors[v] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), x.classes[v]) -
                                 distinct.begin());
  }
  return colors;
}

inline int count_colors(const std::vector<int>& colors) {
  int max_color = -1;
  for (int c : colors) max_color = std::max(max_color, c);
  return max_color + 1;
}

}  // namespace detail

inline ColorHistory gwl1(const Hypergraph& h, const NodeAttributes& x, int L, int threads = 1) {
  if (L < 0 && L != kUntilConvergence) throw std::invalid_argument("iteration budget must be >= 0");
  ColorHistory out;
  out.node_colors.push_back(detail::initial_node_colors(h, x));
  out.edge_colors.emplace_back(h.m(), 0);

  // The joint partition strictly refines on every non-final iteration, so
  // convergence is reached within n + m + 1 iterations; the cap is defensive.
  const int max_iterations = (L == kUntilConvergence) ? h.n + h.m() + 2 : L;
  const int m = h.m();

  for (int iter = 1; iter <= max_iterations; ++iter) {
    const std::vector<int>& node_prev = out.node_colors.back();
    const std::vector<int>& edge_prev = out.edge_colors.back();

    std::vector<std::vector<int>> edge_sigs(m);
    detail::parallel_for(m, threads, [&](int begin, int end) {
      for (int e = begin; e < end; ++e) {
        std::vector<int>& sig = edge_sigs[e];
        sig.reserve(h.edge_sizes[e] + 1);
        sig.push_back(edge_prev[e]);
        for (int v : h.edges[e]) sig.push_back(node_prev[v]);
        std::sort(sig.begin() + 1, sig.end());
      }
    });
    detail::SignatureInterner edge_interner;
    std::vector<int> edge_next(m);
    for (int e = 0; e < m; ++e) edge_next[e] = edge_interner.intern(std::move(edge_sigs[e]));

    std::vector<std::vector<int>> node_sigs(h.n);
    detail::parallel_for(h.n, threads, [&](int begin, int end) {
      for (int v = begin; v < end; ++v) {
        std::vector<int>& sig = node_sigs[v];
        sig.reserve(h.vertex_incidence[v].size() + 1);
        sig.push_back(node_prev[v]);
        for (int e : h.vertex_incidence[v]) sig.push_back(edge_next[e]);
        std::sort(sig.begin() + 1, sig.end());
      }
    });
    detail::SignatureInterner node_interner;
    std::vector<int> node_next(h.n);
    for (int v = 0; v < h.n; ++v) node_next[v] = node_interner.intern(std::move(node_sigs[v]));

    // Each new partition refines the previous one (the signature carries the
    // element's own previous color), so equal class counts mean equal
    // partitions.
    const bool stable = detail::count_colors(node_next) == detail::count_colors(node_prev) &&
                        detail::count_colors(edge_next) == detail::count_colors(edge_prev);
    out.node_colors.push_back(std::move(node_next));
    out.edge_colors.push_back(std::move(edge_next));
    if (stable && !out.converged_at) {
      out.converged_at = iter;
      if (L == kUntilConvergence) break;
    }
  }
  return out;
}

inline ColorHistory wl1_clique(const Hypergraph& h, const NodeAttributes& x, int L, int threads = 1) {
  if (L < 0 && L != kUntilConvergence) throw std::invalid_argument("iteration budget must be >= 0");

  // Unweighted support of the clique expansion, off-diagonal only: u ~ v iff
  // some hyperedge contains both (WL-1 is defined on plain graphs).
  std::vector<std::vector<int>> adj(h.n);
  for (int u = 0; u < h.n; ++u) {
    std::vector<int>& nbrs = adj[u];
    for (int e : h.vertex_incidence[u]) {
      for (int v : h.edges[e]) {
        if (v != u) nbrs.push_back(v);
      }
    }
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  ColorHistory out;
  out.node_colors.push_back(detail::initial_node_colors(h, x));
  const int max_iterations = (L == kUntilConvergence) ? h.n + 2 : L;

  for (int iter = 1; iter <= max_iterations; ++iter) {
    const std::vector<int>& prev = out.node_colors.back();
    std::vector<std::vector<int>> sigs(h.n);
    detail::parallel_for(h.n, threads, [&](int begin, int end) {
      for (int v = begin; v < end; ++v) {
        std::vector<int>& sig = sigs[v];
        sig.reserve(adj[v].size() + 1);
        sig.push_back(prev[v]);
        for (int u : adj[v]) sig.push_back(prev[u]);
        std::sort(sig.begin() + 1, sig.end());
      }
    });
    detail::SignatureInterner interner;
    std::vector<int> next(h.n);
    for (int v = 0; v < h.n; ++v) next[v] = interner.intern(std::move(sigs[v]));

    const bool stable = detail::count_colors(next) == detail::count_colors(prev);
    out.node_colors.push_back(std::move(next));
    if (stable && !out.converged_at) {
      out.converged_at = iter;
      if (L == kUntilConvergence) break;
    }
  }
  return out;
}

// Vertex partition at iteration i as a sorted map color id -> sorted vertices.
inline std::map<int, std::vector<int>> color_classes(const ColorHistory& ch, int i) {
  if (i < 0 || i >= static_cast<int>(ch.node_colors.size())) {
    throw std::invalid_argument("iteration " + std::to_string(i) + " not recorded");
  }
  std::map<int, std::vector<int>> classes;
  for (int v = 0; v < static_cast<int>(ch.node_colors[i].size()); ++v) {
    classes[ch.node_colors[i][v]].push_back(v);
  }
  return classes;
}

// Canonical multiset code of a vertex set's colors at iteration i: the
// sorted color list. Equal codes iff the color multisets are equal.
inline std::vector<int> aggregate_representation(const ColorHistory& ch,
                                                 const std::vector<int>& s, int i) {
  if (s.empty()) throw std::invalid_argument("aggregate_representation needs a nonempty vertex set");
  if (i < 0 || i >= static_cast<int>(ch.node_colors.size())) {
    throw std::invalid_argument("iteration " + std::to_string(i) + " not recorded");
  }
  std::vector<int> code;
  code.reserve(s.size());
  for (int v : s) code.push_back(ch.node_colors[i].at(v));
  std::sort(code.begin(), code.end());
  return code;
}

}  // namespace hypersym
