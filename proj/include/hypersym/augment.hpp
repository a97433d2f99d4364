#pragma once

// Symmetry-breaking transforms: deterministic covering-hyperedge attachment,
// the randomized drop/attach sampler over discovered components, Monte Carlo
// estimation of the expected stationary distribution of the perturbed
// hypergraph, and the fixed-point solve for attach probabilities q that make
// that expectation match the original distribution at component
// representatives.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hypersym/core.hpp"
#include "hypersym/rng.hpp"
#include "hypersym/symmetry.hpp"

namespace hypersym {

enum class AugmentMode { kAttachOnly, kReplace, kSample };

struct AugmentationPlan {
  double p = 0.0;            // drop probability for edges inside components
  std::vector<double> q;     // attach probability per component
  std::uint64_t seed = 0;
  AugmentMode mode = AugmentMode::kSample;
};

struct AugmentationSample {
  Hypergraph hypergraph;
  std::vector<int> dropped_edges;        // edge ids of the input hypergraph
  std::vector<int> attached_components;  // indices into report.components
};

struct StationaryEstimate {
  std::vector<double> mean;       // per vertex
  std::vector<double> std_error;  // per vertex
  int samples = 0;
};

enum class SolveBackend { kAuto, kExact, kMonteCarlo };

struct UnbiasednessSolution {
  std::vector<double> q;        // clamped to [0,1]
  std::vector<double> q_raw;    // unclamped final solve, diagnoses infeasibility
  std::vector<double> residual; // |E[pi_hat(rep_i)] - pi(rep_i)| at the clamped q
  std::vector<int> infeasible_components;
  bool feasible = true;
  bool exact = true;
  int iterations = 0;
};

// Degree share deg(v)/volume; the all-zero vector when there are no edges.
// Coincides with the random-walk stationary distribution on connected
// hypergraphs but stays defined for disconnected or empty ones.
inline std::vector<double> degree_distribution(const Hypergraph& h) {
  std::vector<double> probs(h.n, 0.0);
  if (h.nnz == 0) return probs;
  for (int v = 0; v < h.n; ++v)
    probs[v] = static_cast<double>(degree(h, v)) / static_cast<double>(h.nnz);
  return probs;
}

namespace detail {

inline void validate_probability(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

inline void validate_report(const Hypergraph& h, const SymmetryReport& r) {
  std::vector<char> seen(h.n, 0);
  std::vector<char> edge_seen(h.m(), 0);
  for (std::size_t i = 0; i < r.components.size(); ++i) {
    const SymmetryComponent& c = r.components[i];
    if (c.vertex_set.empty())
      throw std::invalid_argument("symmetry component " + std::to_string(i) + " is empty");
    if (!std::is_sorted(c.vertex_set.begin(), c.vertex_set.end()))
      throw std::invalid_argument("symmetry component " + std::to_string(i) + " is not sorted");
    for (int v : c.vertex_set) {
      if (v < 0 || v >= h.n)
        throw std::invalid_argument("symmetry component " + std::to_string(i) +
                                    " references vertex " + std::to_string(v));
      if (seen[v])
        throw std::invalid_argument("symmetry components overlap at vertex " + std::to_string(v));
      seen[v] = 1;
    }
    for (int e : c.edge_ids) {
      if (e < 0 || e >= h.m())
        throw std::invalid_argument("symmetry component " + std::to_string(i) +
                                    " references hyperedge " + std::to_string(e));
      if (edge_seen[e])
        throw std::invalid_argument("symmetry components share hyperedge " + std::to_string(e));
      edge_seen[e] = 1;
    }
  }
}

inline void validate_plan(const Hypergraph& h, const SymmetryReport& r,
                          const AugmentationPlan& plan) {
  validate_report(h, r);
  validate_probability(plan.p, "drop probability p");
  if (plan.q.size() != r.components.size())
    throw std::invalid_argument("plan needs one q per component: got " +
                                std::to_string(plan.q.size()) + " for " +
                                std::to_string(r.components.size()));
  for (double qi : plan.q) validate_probability(qi, "attach probability q");
}

// One independent Bernoulli contribution to the sampled degree sequence.
// Drop factors keep an in-component edge with probability 1-p; cover factors
// attach a component's covering hyperedge with probability q_i; when a cover
// coincides with an in-component edge the two fuse (the edge set contains the
// cover iff the edge is kept OR the cover attached) into one factor present
// with probability 1 - p*(1-q_i).
struct PresenceFactor {
  std::vector<int> members;  // sorted vertex ids
  int weight = 0;            // contribution to the total degree when present
  int edge_id = -1;          // underlying droppable edge, -1 for pure covers
  int component = -1;        // component whose q scales this factor, -1 for pure drops
};

struct SamplerModel {
  std::vector<int> base_degree;   // degrees from edges that are never dropped
  std::int64_t base_total = 0;
  std::vector<PresenceFactor> factors;
  std::vector<int> cover_factor;  // per component; -1 when the cover is inert
  std::vector<int> reps;          // smallest vertex of each component
  std::vector<double> target;     // degree share of each rep in the input
  std::vector<int> in_component_edges;  // sorted R_E
};

inline double presence_probability(const PresenceFactor& f, double p,
                                   const std::vector<double>& q) {
  if (f.component < 0) return 1.0 - p;                      // pure drop
  if (f.edge_id < 0) return q[f.component];                 // pure cover
  return 1.0 - p * (1.0 - q[f.component]);                  // fused
}

inline SamplerModel build_model(const Hypergraph& h, const SymmetryReport& r) {
  SamplerModel model;
  const int k = static_cast<int>(r.components.size());
  std::vector<int> edge_component(h.m(), -1);
  for (int i = 0; i < k; ++i)
    for (int e : r.components[i].edge_ids) edge_component[e] = i;

  // A cover equal to an existing hyperedge never adds a new edge (set
  // semantics). If that edge is droppable the two fuse into one factor; if it
  // is never dropped the cover is inert and q_i has no effect.
  std::vector<int> fused_edge(k, -1);
  std::vector<char> inert(k, 0);
  for (int i = 0; i < k; ++i) {
    const std::vector<int>& cover = r.components[i].vertex_set;
    const auto it = std::lower_bound(h.edges.begin(), h.edges.end(), cover);
    if (it == h.edges.end() || *it != cover) continue;
    const int e = static_cast<int>(it - h.edges.begin());
    if (edge_component[e] == i) {
      fused_edge[i] = e;
    } else if (edge_component[e] < 0) {
      inert[i] = 1;
    } else {
      throw std::invalid_argument("cover of component " + std::to_string(i) +
                                  " equals a hyperedge of another component");
    }
  }

  model.base_degree.assign(h.n, 0);
  model.cover_factor.assign(k, -1);
  for (int e = 0; e < h.m(); ++e) {
    if (edge_component[e] < 0) {
      for (int v : h.edges[e]) ++model.base_degree[v];
      model.base_total += h.edge_sizes[e];
      continue;
    }
    model.in_component_edges.push_back(e);
    PresenceFactor f;
    f.members = h.edges[e];
    f.weight = h.edge_sizes[e];
    f.edge_id = e;
    const int i = edge_component[e];
    if (fused_edge[i] == e) {
      f.component = i;
      model.cover_factor[i] = static_cast<int>(model.factors.size());
    }
    model.factors.push_back(std::move(f));
  }
  for (int i = 0; i < k; ++i) {
    if (fused_edge[i] >= 0 || inert[i]) continue;
    PresenceFactor f;
    f.members = r.components[i].vertex_set;
    f.weight = static_cast<int>(f.members.size());
    f.component = i;
    model.cover_factor[i] = static_cast<int>(model.factors.size());
    model.factors.push_back(std::move(f));
  }

  const std::vector<double> share = degree_distribution(h);
  for (int i = 0; i < k; ++i) {
    model.reps.push_back(r.components[i].vertex_set.front());
    model.target.push_back(share[model.reps.back()]);
  }
  return model;
}

inline bool factor_contains(const PresenceFactor& f, int v) {
  return std::binary_search(f.members.begin(), f.members.end(), v);
}

// Exact E[pi_hat(v)] at (p, q). Conditions on the factors incident to v,
// convolves the weight distribution of the rest, and aggregates
// N_v * E[1/(T_local + S_rest)] over local outcomes. A vanishing N_v
// contributes 0 even when the whole degree sum vanishes.
inline double exact_expected_share(const SamplerModel& model, int v, double p,
                                   const std::vector<double>& q) {
  std::vector<int> local, rest;
  for (std::size_t f = 0; f < model.factors.size(); ++f)
    (factor_contains(model.factors[f], v) ? local : rest).push_back(static_cast<int>(f));
  if (local.size() > 24)
    throw std::runtime_error("exact evaluator: vertex touches too many random factors");

  int max_weight = 0;
  for (int f : rest) max_weight += model.factors[f].weight;
  std::vector<double> dist(static_cast<std::size_t>(max_weight) + 1, 0.0);
  dist[0] = 1.0;
  int upper = 0;
  for (int f : rest) {
    const double pr = presence_probability(model.factors[f], p, q);
    if (pr == 0.0) continue;
    const int w = model.factors[f].weight;
    for (int s = upper; s >= 0; --s) {
      dist[s + w] += dist[s] * pr;
      dist[s] *= 1.0 - pr;
    }
    upper += w;
  }

  double expectation = 0.0;
  const unsigned n_local = static_cast<unsigned>(local.size());
  for (unsigned mask = 0; mask < (1u << n_local); ++mask) {
    double pr = 1.0;
    int nv = model.base_degree[v];
    std::int64_t t_local = model.base_total;
    for (unsigned b = 0; b < n_local; ++b) {
      const PresenceFactor& f = model.factors[local[b]];
      const double pf = presence_probability(f, p, q);
      if (mask >> b & 1u) {
        pr *= pf;
        nv += 1;
        t_local += f.weight;
      } else {
        pr *= 1.0 - pf;
      }
    }
    if (pr == 0.0 || nv == 0) continue;
    double inner = 0.0;
    for (int s = 0; s <= upper; ++s)
      if (dist[s] != 0.0) inner += dist[s] / static_cast<double>(t_local + s);
    expectation += pr * static_cast<double>(nv) * inner;
  }
  return expectation;
}

// One evaluation of the affine map q_i -> E[pi_hat(rep_i)]: the expectation
// with the cover absent (c0) and present (c1), plus standard errors when the
// evaluation is Monte Carlo (zero for exact evaluations). slope_stderr is the
// standard error of c1 - c0, which common random numbers make far smaller
// than the individual errors.
struct AffinePoint {
  double c0 = 0.0;
  double c1 = 0.0;
  double c0_stderr = 0.0;
  double slope_stderr = 0.0;
};

// Monte Carlo counterpart of exact_expected_share for the fixed-point solve.
// All randomness comes from per-factor streams pinned at construction, so a
// sweep over components re-uses common random numbers: totals are maintained
// incrementally as q evolves and per-rep base degrees never change (drop
// probabilities are fixed and components are vertex-disjoint).
class McEvaluator {
 public:
  McEvaluator(const SamplerModel& model, double p, int samples, std::uint64_t seed)
      : model_(model), p_(p), samples_(samples), seed_(seed) {
    const int k = static_cast<int>(model.reps.size());
    totals_.assign(samples, model.base_total);
    rep_base_.assign(k, {});
    for (int i = 0; i < k; ++i)
      rep_base_[i].assign(samples, model.base_degree[model.reps[i]]);
    // Presence of drop draws is fixed for the whole solve; covers start absent
    // (q = 0), so fused factors contribute exactly their kept-edge part.
    for (std::size_t f = 0; f < model.factors.size(); ++f) {
      const PresenceFactor& factor = model.factors[f];
      if (factor.edge_id < 0) continue;
      Rng rng = drop_stream(f);
      for (int s = 0; s < samples; ++s) {
        if (rng.uniform() < p) continue;  // dropped
        totals_[s] += factor.weight;
        if (factor.component >= 0) continue;  // fused: handled in evaluate()
        for (int i = 0; i < k; ++i)
          if (factor_contains(factor, model.reps[i])) ++rep_base_[i][s];
      }
    }
  }

  // Evaluates E[pi_hat(rep_i) | cover i absent/present] given the other
  // components at probabilities q. totals_ must reflect q with component i at
  // q[i] (the invariant update() maintains).
  AffinePoint evaluate(int i, const std::vector<double>& q) {
    const int f = model_.cover_factor[i];
    const PresenceFactor& factor = model_.factors[f];
    const int w = factor.weight;
    std::vector<char> present(samples_, 0);
    current_presence(f, q[i], present);
    std::vector<char> kept;
    if (factor.edge_id >= 0) {
      kept.assign(samples_, 0);
      Rng rng = drop_stream(static_cast<std::size_t>(f));
      for (int s = 0; s < samples_; ++s) kept[s] = rng.uniform() >= p_ ? 1 : 0;
    }
    double sum0 = 0.0, sum0_sq = 0.0, sum_diff = 0.0, sum_diff_sq = 0.0, sum1 = 0.0;
    for (int s = 0; s < samples_; ++s) {
      const std::int64_t t_base = totals_[s] - (present[s] ? w : 0);
      const int keep = kept.empty() ? 0 : kept[s];
      const int n0 = rep_base_[i][s] + keep;
      const double s0 =
          n0 > 0 ? static_cast<double>(n0) / static_cast<double>(t_base + (keep ? w : 0)) : 0.0;
      const double s1 =
          static_cast<double>(rep_base_[i][s] + 1) / static_cast<double>(t_base + w);
      sum0 += s0;
      sum0_sq += s0 * s0;
      sum1 += s1;
      const double diff = s1 - s0;
      sum_diff += diff;
      sum_diff_sq += diff * diff;
    }
    AffinePoint out;
    const double n = samples_;
    out.c0 = sum0 / n;
    out.c1 = sum1 / n;
    if (samples_ > 1) {
      const double var0 = std::max(0.0, (sum0_sq - n * out.c0 * out.c0) / (n - 1.0));
      const double mean_diff = sum_diff / n;
      const double var_diff =
          std::max(0.0, (sum_diff_sq - n * mean_diff * mean_diff) / (n - 1.0));
      out.c0_stderr = std::sqrt(var0 / n);
      out.slope_stderr = std::sqrt(var_diff / n);
    }
    return out;
  }

  // Re-draws component i's cover presence after q[i] changed from old_q. For
  // fused factors a kept edge pins presence at 1, so only samples with the
  // edge dropped can flip.
  void update(int i, double old_q, double new_q) {
    const int f = model_.cover_factor[i];
    const PresenceFactor& factor = model_.factors[f];
    const int w = factor.weight;
    std::vector<char> kept;
    if (factor.edge_id >= 0) {
      kept.assign(samples_, 0);
      Rng rng = drop_stream(static_cast<std::size_t>(f));
      for (int s = 0; s < samples_; ++s) kept[s] = rng.uniform() >= p_ ? 1 : 0;
    }
    Rng rng = cover_stream(static_cast<std::size_t>(f));
    for (int s = 0; s < samples_; ++s) {
      const double u = rng.uniform();
      if (!kept.empty() && kept[s]) continue;
      const int before = u < old_q ? 1 : 0;
      const int after = u < new_q ? 1 : 0;
      totals_[s] += static_cast<std::int64_t>(w) * (after - before);
    }
  }

  // E[pi_hat(rep_i)] at the current q (for residual reporting).
  double expected_share(int i, const std::vector<double>& q) {
    if (model_.cover_factor[i] < 0) return plain_point(i).c0;
    const AffinePoint e = evaluate(i, q);
    return (1.0 - q[i]) * e.c0 + q[i] * e.c1;
  }

  // E[pi_hat(rep_i)] for a component with an inert cover (q_i has no effect,
  // so the affine map is constant).
  AffinePoint plain_point(int i) {
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < samples_; ++s) {
      const double share =
          rep_base_[i][s] > 0
              ? static_cast<double>(rep_base_[i][s]) / static_cast<double>(totals_[s])
              : 0.0;
      sum += share;
      sum_sq += share * share;
    }
    AffinePoint out;
    const double n = samples_;
    out.c0 = out.c1 = sum / n;
    if (samples_ > 1) {
      const double var = std::max(0.0, (sum_sq - n * out.c0 * out.c0) / (n - 1.0));
      out.c0_stderr = std::sqrt(var / n);
    }
    return out;
  }

 private:
  Rng drop_stream(std::size_t f) const { return Rng::stream(seed_, 2 * f); }
  Rng cover_stream(std::size_t f) const { return Rng::stream(seed_, 2 * f + 1); }

  // Presence of factor f's cover part at probability qi (drop part excluded:
  // for fused factors the kept-edge contribution is ORed in by the caller).
  void current_presence(int f, double qi, std::vector<char>& present) {
    const PresenceFactor& factor = model_.factors[f];
    Rng cover = cover_stream(static_cast<std::size_t>(f));
    std::vector<char> kept;
    if (factor.edge_id >= 0) {
      kept.assign(samples_, 0);
      Rng rng = drop_stream(static_cast<std::size_t>(f));
      for (int s = 0; s < samples_; ++s) kept[s] = rng.uniform() >= p_ ? 1 : 0;
    }
    for (int s = 0; s < samples_; ++s) {
      const int attached = cover.uniform() < qi ? 1 : 0;
      present[s] = static_cast<char>(attached || (!kept.empty() && kept[s]));
    }
  }

  const SamplerModel& model_;
  double p_;
  int samples_;
  std::uint64_t seed_;
  std::vector<std::int64_t> totals_;
  std::vector<std::vector<int>> rep_base_;
};

}  // namespace detail

// H_attach = (V, E ∪ covers): one covering hyperedge per component. Set
// semantics: a cover equal to an existing hyperedge leaves the edge set
// unchanged.
inline Hypergraph attach_covers(const Hypergraph& h, const SymmetryReport& r) {
  detail::validate_report(h, r);
  std::vector<std::vector<int>> edges = h.edges;
  for (const SymmetryComponent& c : r.components) edges.push_back(c.vertex_set);
  return build(h.n, std::move(edges));
}

// H_replace = (V, (E \ R_E) ∪ covers): drops every in-component hyperedge and
// attaches the covers.
inline Hypergraph replace_components(const Hypergraph& h, const SymmetryReport& r) {
  detail::validate_report(h, r);
  std::vector<char> drop(h.m(), 0);
  for (const SymmetryComponent& c : r.components)
    for (int e : c.edge_ids) drop[e] = 1;
  std::vector<std::vector<int>> edges;
  for (int e = 0; e < h.m(); ++e)
    if (!drop[e]) edges.push_back(h.edges[e]);
  for (const SymmetryComponent& c : r.components) edges.push_back(c.vertex_set);
  return build(h.n, std::move(edges));
}

// One draw of the randomized augmentation: every in-component hyperedge is
// dropped independently with probability p, every cover attached
// independently with probability q_i. Draw order (in-component edges
// ascending, then components ascending) is fixed, so output is a pure
// function of (h, r, plan).
inline AugmentationSample sample_augmentation(const Hypergraph& h, const SymmetryReport& r,
                                              const AugmentationPlan& plan) {
  detail::validate_plan(h, r, plan);
  if (plan.mode != AugmentMode::kSample)
    throw std::invalid_argument("sample_augmentation requires plan.mode = sample");
  std::vector<char> drop(h.m(), 0);
  AugmentationSample out;
  Rng rng(plan.seed);
  std::vector<int> in_component;
  for (const SymmetryComponent& c : r.components)
    in_component.insert(in_component.end(), c.edge_ids.begin(), c.edge_ids.end());
  std::sort(in_component.begin(), in_component.end());
  for (int e : in_component) {
    if (rng.bernoulli(plan.p)) {
      drop[e] = 1;
      out.dropped_edges.push_back(e);
    }
  }
  std::vector<char> attach(r.components.size(), 0);
  for (std::size_t i = 0; i < r.components.size(); ++i) {
    if (rng.bernoulli(plan.q[i])) {
      attach[i] = 1;
      out.attached_components.push_back(static_cast<int>(i));
    }
  }
  std::vector<std::vector<int>> edges;
  for (int e = 0; e < h.m(); ++e)
    if (!drop[e]) edges.push_back(h.edges[e]);
  for (std::size_t i = 0; i < r.components.size(); ++i)
    if (attach[i]) edges.push_back(r.components[i].vertex_set);
  out.hypergraph = build(h.n, std::move(edges));
  return out;
}

inline Hypergraph sample(const Hypergraph& h, const SymmetryReport& r,
                         const AugmentationPlan& plan) {
  return sample_augmentation(h, r, plan).hypergraph;
}

// Monte Carlo estimate of E[pi_hat(v)] under the drop/attach sampler, where
// pi_hat(v) = deg(v)/sum of degrees in the sampled hypergraph and a vertex of
// degree 0 contributes probability 0 (the all-dropped draw yields the zero
// vector). Draws use independent per-sample streams of `seed`.
inline StationaryEstimate expected_stationary(const Hypergraph& h, const SymmetryReport& r,
                                              const AugmentationPlan& plan, int n_samples,
                                              std::uint64_t seed) {
  detail::validate_plan(h, r, plan);
  if (n_samples <= 0) throw std::invalid_argument("expected_stationary needs n_samples >= 1");
  const detail::SamplerModel model = detail::build_model(h, r);
  // Welford accumulation: constant share sequences (degenerate probabilities)
  // yield the exact mean and exactly zero variance.
  std::vector<double> mean(h.n, 0.0), m2(h.n, 0.0);
  std::vector<int> deg(h.n);
  std::vector<char> present(model.factors.size());
  for (int s = 0; s < n_samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    std::int64_t total = model.base_total;
    for (std::size_t f = 0; f < model.factors.size(); ++f) {
      const double pr = detail::presence_probability(model.factors[f], plan.p, plan.q);
      present[f] = static_cast<char>(rng.uniform() < pr);
      if (present[f]) total += model.factors[f].weight;
    }
    std::copy(model.base_degree.begin(), model.base_degree.end(), deg.begin());
    for (std::size_t f = 0; f < model.factors.size(); ++f)
      if (present[f])
        for (int v : model.factors[f].members) ++deg[v];
    for (int v = 0; v < h.n; ++v) {
      const double share =
          total == 0 ? 0.0 : static_cast<double>(deg[v]) / static_cast<double>(total);
      const double delta = share - mean[v];
      mean[v] += delta / (s + 1);
      m2[v] += delta * (share - mean[v]);
    }
  }
  StationaryEstimate est;
  est.samples = n_samples;
  est.mean = std::move(mean);
  est.std_error.assign(h.n, 0.0);
  if (n_samples > 1) {
    for (int v = 0; v < h.n; ++v)
      est.std_error[v] = std::sqrt(std::max(0.0, m2[v] / (n_samples - 1)) / n_samples);
  }
  return est;
}

// Solves for per-component attach probabilities q so that
// E[pi_hat(rep_i)] = pi(rep_i) at the given drop probability p, where rep_i is
// the smallest vertex of component i and pi is the degree share in the input.
// All components are perturbed jointly (they couple through the global degree
// sum), so the per-component affine solves q_i = (pi - C1)/C2 are iterated
// Gauss-Seidel style to a fixed point, clamped into [0,1]. Expectations are
// exact (weight-distribution convolution) when at most 20 hyperedges are
// droppable, Monte Carlo with common random numbers otherwise. A component
// whose unclamped solve lands outside [0,1] is reported infeasible: p is too
// small to leave room for the cover's mass.
inline UnbiasednessSolution solve_unbiased(const Hypergraph& h, const SymmetryReport& r,
                                           double p, double tolerance = 1e-6,
                                           SolveBackend backend = SolveBackend::kAuto,
                                           int mc_samples = 20000, std::uint64_t seed = 0) {
  detail::validate_report(h, r);
  detail::validate_probability(p, "drop probability p");
  if (tolerance <= 0.0) throw std::invalid_argument("tolerance must be positive");
  if (mc_samples < 2) throw std::invalid_argument("mc_samples must be at least 2");
  const detail::SamplerModel model = detail::build_model(h, r);
  const int k = static_cast<int>(model.reps.size());

  UnbiasednessSolution sol;
  sol.q.assign(k, 0.0);
  sol.q_raw.assign(k, 0.0);
  sol.residual.assign(k, 0.0);
  if (k == 0) return sol;

  bool use_exact = backend != SolveBackend::kMonteCarlo;
  if (backend == SolveBackend::kAuto) {
    use_exact = model.in_component_edges.size() <= 20;
    if (use_exact) {
      for (int i = 0; i < k && use_exact; ++i) {
        int local = 0;
        for (const detail::PresenceFactor& f : model.factors)
          if (detail::factor_contains(f, model.reps[i])) ++local;
        if (local > 24) use_exact = false;
      }
    }
  }
  sol.exact = use_exact;

  detail::McEvaluator* mc = nullptr;
  std::unique_ptr<detail::McEvaluator> mc_storage;
  if (!use_exact) {
    mc_storage = std::make_unique<detail::McEvaluator>(model, p, mc_samples, seed);
    mc = mc_storage.get();
  }

  const auto affine = [&](int i) -> detail::AffinePoint {
    std::vector<double>& q = sol.q;
    if (model.cover_factor[i] < 0) {  // inert cover: q_i has no effect
      if (!use_exact) return mc->plain_point(i);
      detail::AffinePoint out;
      out.c0 = out.c1 = detail::exact_expected_share(model, model.reps[i], p, q);
      return out;
    }
    if (use_exact) {
      const double save = q[i];
      detail::AffinePoint out;
      q[i] = 0.0;
      out.c0 = detail::exact_expected_share(model, model.reps[i], p, q);
      q[i] = 1.0;
      out.c1 = detail::exact_expected_share(model, model.reps[i], p, q);
      q[i] = save;
      return out;
    }
    return mc->evaluate(i, q);
  };
  const auto share_at_current_q = [&](int i) {
    return use_exact ? detail::exact_expected_share(model, model.reps[i], p, sol.q)
                     : mc->expected_share(i, sol.q);
  };

  const int max_sweeps = use_exact ? 20000 : 400;
  const double step_floor = use_exact ? 1e-14 : 1e-10;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (int i = 0; i < k; ++i) {
      const detail::AffinePoint e = affine(i);
      const double slope = e.c1 - e.c0;
      // A slope statistically indistinguishable from zero gives q_i no
      // measurable leverage: keep the current value when the bias is also
      // within noise/tolerance, otherwise no q_i can fix it.
      const double slope_floor = std::max(3.0 * e.slope_stderr, 1e-15);
      double raw;
      if (std::abs(slope) <= slope_floor) {
        raw = std::abs(model.target[i] - e.c0) <= std::max(tolerance, 3.0 * e.c0_stderr)
                  ? sol.q[i]
                  : std::numeric_limits<double>::quiet_NaN();
      } else {
        raw = (model.target[i] - e.c0) / slope;
      }
      const double clamped = std::isnan(raw) ? 0.0 : std::min(1.0, std::max(0.0, raw));
      max_step = std::max(max_step, std::abs(clamped - sol.q[i]));
      if (!use_exact && model.cover_factor[i] >= 0 && clamped != sol.q[i])
        mc->update(i, sol.q[i], clamped);
      sol.q_raw[i] = raw;
      sol.q[i] = clamped;
    }
    // Components couple through the global degree total, so convergence must
    // be judged on the true residual at the joint q reached by the sweep, not
    // on the per-component affine predictions (those are exactly zero right
    // after each single-component solve).
    double max_residual = 0.0;
    for (int i = 0; i < k; ++i)
      max_residual = std::max(max_residual, std::abs(share_at_current_q(i) - model.target[i]));
    if (max_residual <= tolerance || max_step < step_floor) {
      ++sweep;
      break;
    }
  }
  sol.iterations = sweep;

  for (int i = 0; i < k; ++i) {
    const double share = use_exact
                             ? detail::exact_expected_share(model, model.reps[i], p, sol.q)
                             : mc->expected_share(i, sol.q);
    sol.residual[i] = std::abs(share - model.target[i]);
    const double raw = sol.q_raw[i];
    if (std::isnan(raw) || raw < -tolerance || raw > 1.0 + tolerance) {
      sol.feasible = false;
      sol.infeasible_components.push_back(i);
    }
  }
  return sol;
}

}  // namespace hypersym
