#pragma once

// Dataset plumbing: the simplex-list triple format (per-simplex vertex
// counts, flattened 1-based vertex ids, per-simplex timestamps), temporal
// train/val/test splitting for hyperedge prediction, and negative k-set
// sampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hypersym/core.hpp"
#include "hypersym/rng.hpp"

namespace hypersym {

struct TemporalHypergraph {
  Hypergraph hypergraph;
  std::vector<double> timestamps;  // aligned with hypergraph.edges

  bool operator==(const TemporalHypergraph& other) const {
    return hypergraph == other.hypergraph && timestamps == other.timestamps;
  }
};

struct ParseStats {
  int singletons_dropped = 0;
  int duplicates_merged = 0;
};

namespace detail {

inline std::vector<double> read_reals(std::istream& in, const char* what) {
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      const double value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      values.push_back(value);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("non-numeric token in ") + what + ": '" + token +
                                  "'");
    }
  }
  return values;
}

inline std::vector<long long> read_integers(std::istream& in, const char* what) {
  std::vector<long long> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      const long long value = std::stoll(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      values.push_back(value);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("non-numeric token in ") + what + ": '" + token +
                                  "'");
    }
  }
  return values;
}

struct EdgeSetHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(static_cast<unsigned>(x)) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace detail

// Canonicalizes timestamped raw edges (0-based ids): simplices collapsing
// below size 2 are dropped; duplicate hyperedges merge, keeping the earliest
// timestamp; timestamps end up aligned with the canonical edge order.
inline TemporalHypergraph make_temporal(int n, const std::vector<std::vector<int>>& raw_edges,
                                        const std::vector<double>& times,
                                        ParseStats* stats = nullptr) {
  if (raw_edges.size() != times.size())
    throw std::invalid_argument("need one timestamp per raw hyperedge: got " +
                                std::to_string(times.size()) + " for " +
                                std::to_string(raw_edges.size()));
  for (double t : times)
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite timestamp");

  ParseStats local;
  std::map<std::vector<int>, double> earliest;
  for (std::size_t s = 0; s < raw_edges.size(); ++s) {
    std::vector<int> edge = raw_edges[s];
    for (int v : edge)
      if (v < 0 || v >= n)
        throw std::invalid_argument("hyperedge " + std::to_string(s) + " references vertex " +
                                    std::to_string(v) + " outside [0, " + std::to_string(n) + ")");
    std::sort(edge.begin(), edge.end());
    edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
    if (edge.size() < 2) {
      ++local.singletons_dropped;
      continue;
    }
    const auto [it, inserted] = earliest.try_emplace(std::move(edge), times[s]);
    if (!inserted) {
      ++local.duplicates_merged;
      it->second = std::min(it->second, times[s]);
    }
  }

  TemporalHypergraph th;
  std::vector<std::vector<int>> edges;
  edges.reserve(earliest.size());
  for (const auto& [edge, time] : earliest) edges.push_back(edge);
  th.hypergraph = build(n, std::move(edges));
  th.timestamps.reserve(th.hypergraph.m());
  for (const std::vector<int>& edge : th.hypergraph.edges)
    th.timestamps.push_back(earliest.at(edge));
  if (stats) *stats = local;
  return th;
}

// Parses the aligned triple (counts, flattened 1-based ids, timestamps).
// Vertex ids are densified to 0-based ranks of the sorted distinct ids.
inline TemporalHypergraph parse_simplex_list(std::istream& nverts_stream,
                                             std::istream& simplices_stream,
                                             std::istream& times_stream,
                                             ParseStats* stats = nullptr) {
  const std::vector<long long> counts = detail::read_integers(nverts_stream, "nverts");
  const std::vector<long long> flat = detail::read_integers(simplices_stream, "simplices");
  const std::vector<double> times = detail::read_reals(times_stream, "times");

  long long declared = 0;
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("negative simplex size in nverts");
    declared += c;
  }
  if (declared != static_cast<long long>(flat.size()))
    throw std::invalid_argument("nverts declares " + std::to_string(declared) +
                                " vertex ids but simplices holds " + std::to_string(flat.size()));
  if (counts.size() != times.size())
    throw std::invalid_argument("nverts lists " + std::to_string(counts.size()) +
                                " simplices but times holds " + std::to_string(times.size()));

  std::vector<long long> distinct(flat);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (!distinct.empty() && distinct.front() < 1)
    throw std::invalid_argument("simplex vertex ids are 1-based; saw " +
                                std::to_string(distinct.front()));

  std::vector<std::vector<int>> edges;
  edges.reserve(counts.size());
  std::size_t cursor = 0;
  for (long long c : counts) {
    std::vector<int> edge;
    edge.reserve(static_cast<std::size_t>(c));
    for (long long i = 0; i < c; ++i) {
      const long long id = flat[cursor++];
      edge.push_back(static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), id) - distinct.begin()));
    }
    edges.push_back(std::move(edge));
  }
  return make_temporal(static_cast<int>(distinct.size()), edges, times, stats);
}

// Inverse of parse_simplex_list up to canonical ordering: one simplex per
// line, ids re-based to 1.
inline void emit_simplex_list(const TemporalHypergraph& th, std::ostream& nverts_stream,
                              std::ostream& simplices_stream, std::ostream& times_stream) {
  if (th.timestamps.size() != static_cast<std::size_t>(th.hypergraph.m()))
    throw std::invalid_argument("timestamps length must equal the hyperedge count");
  char buffer[64];
  for (int e = 0; e < th.hypergraph.m(); ++e) {
    nverts_stream << th.hypergraph.edge_sizes[e] << '\n';
    for (std::size_t i = 0; i < th.hypergraph.edges[e].size(); ++i)
      simplices_stream << (i ? " " : "") << th.hypergraph.edges[e][i] + 1;
    simplices_stream << '\n';
    std::snprintf(buffer, sizeof buffer, "%.17g", th.timestamps[e]);
    times_stream << buffer << '\n';
  }
}

struct SplitSpec {
  double train_pct = 0.80;
  double val_pct = 0.85;
  int target_size = 3;
  double negative_ratio = 1.0;
  std::uint64_t seed = 0;
};

struct SplitPart {
  std::vector<std::vector<int>> observed;
  std::vector<std::vector<int>> positives;
  std::vector<std::vector<int>> negatives;
  long long negative_shortfall = 0;
};

struct LinkPredictionSplit {
  SplitPart train, val, test;
};

struct NegativeSampleResult {
  std::vector<std::vector<int>> samples;
  long long shortfall = 0;
};

// Nearest-rank percentile of the timestamp multiset.
inline double nearest_rank_percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(pct > 0.0 && pct <= 1.0)) throw std::invalid_argument("percentile must lie in (0,1]");
  std::sort(values.begin(), values.end());
  const std::size_t rank =
      std::min(values.size(),
               static_cast<std::size_t>(std::ceil(pct * static_cast<double>(values.size()))));
  return values[rank == 0 ? 0 : rank - 1];
}

// Uniform distinct k-subsets of V that equal no existing hyperedge. Counts
// the valid sets exactly (full enumeration) when C(n,k) <= 1e6, falling back
// to rejection sampling with a bounded budget; either way a shortfall is
// reported instead of failing.
inline NegativeSampleResult negative_sample(const Hypergraph& h, int k, long long count,
                                            std::uint64_t seed) {
  if (k < 1 || k > h.n)
    throw std::invalid_argument("negative_sample needs 1 <= k <= n; got k=" + std::to_string(k) +
                                ", n=" + std::to_string(h.n));
  if (count < 0) throw std::invalid_argument("negative_sample count must be >= 0");

  std::unordered_set<std::vector<int>, detail::EdgeSetHash> edges_of_size_k;
  for (int e = 0; e < h.m(); ++e)
    if (h.edge_sizes[e] == k) edges_of_size_k.insert(h.edges[e]);

  NegativeSampleResult result;
  if (count == 0) return result;
  Rng rng(seed);

  const double log_choose = std::lgamma(h.n + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(h.n - k + 1.0);
  if (log_choose <= std::log(1e6)) {
    // Exact path: enumerate every k-subset in lexicographic order.
    std::vector<std::vector<int>> valid;
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i;
    while (true) {
      if (!edges_of_size_k.count(subset)) valid.push_back(subset);
      int i = k - 1;
      while (i >= 0 && subset[i] == h.n - k + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    if (static_cast<long long>(valid.size()) <= count) {
      result.shortfall = count - static_cast<long long>(valid.size());
      result.samples = std::move(valid);
    } else {
      for (long long i = 0; i < count; ++i) {
        const std::size_t j = static_cast<std::size_t>(i) +
                              static_cast<std::size_t>(rng.below(valid.size() - i));
        std::swap(valid[static_cast<std::size_t>(i)], valid[j]);
      }
      valid.resize(static_cast<std::size_t>(count));
      result.samples = std::move(valid);
    }
    std::sort(result.samples.begin(), result.samples.end());
    return result;
  }

  // Rejection path: Floyd's algorithm per draw, dedup against edges and
  // earlier draws.
  std::unordered_set<std::vector<int>, detail::EdgeSetHash> chosen;
  long long budget = 1000 + 50 * count;
  while (static_cast<long long>(chosen.size()) < count && budget-- > 0) {
    std::unordered_set<int> picks;
    for (int j = h.n - k; j < h.n; ++j) {
      const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
      picks.insert(picks.count(t) ? j : t);
    }
    std::vector<int> subset(picks.begin(), picks.end());
    std::sort(subset.begin(), subset.end());
    if (edges_of_size_k.count(subset)) continue;
    chosen.insert(std::move(subset));
  }
  result.samples.assign(chosen.begin(), chosen.end());
  std::sort(result.samples.begin(), result.samples.end());
  result.shortfall = count - static_cast<long long>(result.samples.size());
  return result;
}

// Temporal protocol: hyperedges fall into train/val/test by nearest-rank
// timestamp percentiles (ties stay in the earlier split); within each split
// the size-k hyperedges are shuffled and divided half/half into observed
// context and positive targets; negatives are drawn against the FULL
// dataset's hyperedges so no split leaks.
inline LinkPredictionSplit temporal_split(const TemporalHypergraph& th, const SplitSpec& spec) {
  const Hypergraph& h = th.hypergraph;
  if (h.m() == 0) throw std::invalid_argument("temporal_split needs at least one hyperedge");
  if (th.timestamps.size() != static_cast<std::size_t>(h.m()))
    throw std::invalid_argument("timestamps length must equal the hyperedge count");
  if (!(spec.train_pct > 0.0 && spec.train_pct < spec.val_pct && spec.val_pct <= 1.0))
    throw std::invalid_argument("need 0 < train_pct < val_pct <= 1");
  if (spec.target_size < 2) throw std::invalid_argument("target_size must be >= 2");
  if (spec.negative_ratio < 0.0) throw std::invalid_argument("negative_ratio must be >= 0");

  const double p_train = nearest_rank_percentile(th.timestamps, spec.train_pct);
  const double p_val = nearest_rank_percentile(th.timestamps, spec.val_pct);

  LinkPredictionSplit split;
  SplitPart* parts[3] = {&split.train, &split.val, &split.test};
  std::vector<std::vector<int>> size_k_edges[3];
  for (int e = 0; e < h.m(); ++e) {
    const double t = th.timestamps[e];
    const int s = t <= p_train ? 0 : (t <= p_val ? 1 : 2);
    if (h.edge_sizes[e] == spec.target_size)
      size_k_edges[s].push_back(h.edges[e]);
    else
      parts[s]->observed.push_back(h.edges[e]);
  }
  for (int s = 0; s < 3; ++s) {
    Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(s));
    std::vector<std::vector<int>>& pool = size_k_edges[s];
    rng.shuffle(pool);
    const std::size_t n_pos = pool.size() / 2;
    parts[s]->positives.assign(pool.begin(), pool.begin() + n_pos);
    parts[s]->observed.insert(parts[s]->observed.end(), pool.begin() + n_pos, pool.end());
    std::sort(parts[s]->observed.begin(), parts[s]->observed.end());
    std::sort(parts[s]->positives.begin(), parts[s]->positives.end());
    const long long want = std::llround(spec.negative_ratio * static_cast<double>(n_pos));
    NegativeSampleResult neg = negative_sample(h, spec.target_size, want,
                                               Rng::stream(spec.seed, 3 + s).next());
    parts[s]->negatives = std::move(neg.samples);
    parts[s]->negative_shortfall = neg.shortfall;
  }
  return split;
}

}  // namespace hypersym
