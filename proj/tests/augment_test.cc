#include "hypersym/augment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "hypersym/generators.hpp"
#include "hypersym/oracle.hpp"
#include "hypersym/rng.hpp"

namespace hypersym {
namespace {

Hypergraph hypercycle_pair() {
  return disjoint_union(complete_3_uniform(4), hypercycle_3_uniform(5));
}

int converged_class_count(const Hypergraph& h) {
  const std::vector<int> colors = gwl1(h, {}, kUntilConvergence).node_colors.back();
  return static_cast<int>(std::set<int>(colors.begin(), colors.end()).size());
}

// Test-side oracle: exact E[pi-hat] by enumerating every drop pattern over
// R_E and every attach pattern over the components.
std::vector<double> enumerate_expected_stationary(const Hypergraph& h, const SymmetryReport& r,
                                                  double p, const std::vector<double>& q) {
  std::vector<int> droppable;
  for (const SymmetryComponent& c : r.components)
    droppable.insert(droppable.end(), c.edge_ids.begin(), c.edge_ids.end());
  const int d = static_cast<int>(droppable.size());
  const int k = static_cast<int>(r.components.size());
  std::vector<double> expected(h.n, 0.0);
  for (int drop_mask = 0; drop_mask < (1 << d); ++drop_mask) {
    double drop_prob = 1.0;
    std::set<int> dropped;
    for (int b = 0; b < d; ++b) {
      if (drop_mask & (1 << b)) {
        drop_prob *= p;
        dropped.insert(droppable[b]);
      } else {
        drop_prob *= 1.0 - p;
      }
    }
    for (int attach_mask = 0; attach_mask < (1 << k); ++attach_mask) {
      double prob = drop_prob;
      std::vector<std::vector<int>> edges;
      for (int e = 0; e < h.m(); ++e)
        if (!dropped.count(e)) edges.push_back(h.edges[e]);
      for (int i = 0; i < k; ++i) {
        if (attach_mask & (1 << i)) {
          prob *= q[i];
          edges.push_back(r.components[i].vertex_set);
        } else {
          prob *= 1.0 - q[i];
        }
      }
      if (prob == 0.0) continue;
      const Hypergraph sampled = build(h.n, edges);
      const std::vector<double> share = degree_distribution(sampled);
      for (int v = 0; v < h.n; ++v) expected[v] += prob * share[v];
    }
  }
  return expected;
}

TEST(DegreeDistribution, ClosedFormAndDegenerate) {
  const std::vector<double> path = degree_distribution(path_hypergraph());
  EXPECT_DOUBLE_EQ(path[0], 0.25);
  EXPECT_DOUBLE_EQ(path[1], 0.5);
  EXPECT_DOUBLE_EQ(path[2], 0.25);
  EXPECT_EQ(degree_distribution(build(3, {})), (std::vector<double>{0, 0, 0}));
}

TEST(AttachCovers, AddsOneCoverPerComponent) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  const Hypergraph augmented = attach_covers(u, r);
  EXPECT_EQ(augmented.m(), 11);
  EXPECT_TRUE(std::binary_search(augmented.edges.begin(), augmented.edges.end(),
                                 std::vector<int>{0, 1, 2, 3}));
  EXPECT_TRUE(std::binary_search(augmented.edges.begin(), augmented.edges.end(),
                                 std::vector<int>{4, 5, 6, 7, 8}));

  EXPECT_EQ(attach_covers(u, SymmetryReport{}), u);
}

TEST(AttachCovers, SetSemanticsWhenCoverAlreadyExists) {
  const Hypergraph lone = single_hyperedge(3);
  const SymmetryReport r = find_symmetries(lone, {}, kUntilConvergence, false);
  ASSERT_EQ(r.components.size(), 1u);
  EXPECT_EQ(attach_covers(lone, r), lone);
}

TEST(AttachCovers, BreaksTheHypercycleTie) {
  const Hypergraph u = hypercycle_pair();
  EXPECT_EQ(converged_class_count(u), 1);
  const Hypergraph augmented = attach_covers(u, find_symmetries(u, {}, 2, true));
  EXPECT_EQ(converged_class_count(augmented), 2);
  const std::vector<int> colors = gwl1(augmented, {}, kUntilConvergence).node_colors.back();
  for (int v = 0; v < 4; ++v) EXPECT_EQ(colors[v], colors[0]);
  for (int v = 4; v < 9; ++v) EXPECT_EQ(colors[v], colors[4]);
  EXPECT_NE(colors[0], colors[4]);
  // The brute-force oracle agrees that two is the true orbit count.
  EXPECT_EQ(automorphisms(u, 9).orbits.size(), 2u);
}

TEST(ReplaceComponents, DropsComponentEdgesAndAddsCovers) {
  const Hypergraph u = hypercycle_pair();
  const Hypergraph replaced = replace_components(u, find_symmetries(u, {}, 2, true));
  ASSERT_EQ(replaced.m(), 2);
  EXPECT_EQ(replaced.edges[0], (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(replaced.edges[1], (std::vector<int>{4, 5, 6, 7, 8}));
  EXPECT_EQ(converged_class_count(replaced), 2);

  EXPECT_EQ(replace_components(u, SymmetryReport{}), u);
}

TEST(ReplaceComponents, ClassHomogeneityIncludingAcrossEqualComponents) {
  const Hypergraph twins = disjoint_union(hypercycle_3_uniform(5), hypercycle_3_uniform(5));
  const Hypergraph replaced = replace_components(twins, find_symmetries(twins, {}, 2, true));
  const std::vector<int> colors = gwl1(replaced, {}, kUntilConvergence).node_colors.back();
  for (int v = 1; v < 10; ++v) EXPECT_EQ(colors[v], colors[0]);
}

TEST(Sample, DegenerateProbabilityIdentities) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  AugmentationPlan plan;
  plan.mode = AugmentMode::kSample;
  plan.seed = 99;

  plan.p = 0.0;
  plan.q = {0.0, 0.0};
  EXPECT_EQ(sample(u, r, plan), u);

  plan.p = 1.0;
  plan.q = {1.0, 1.0};
  EXPECT_EQ(sample(u, r, plan), replace_components(u, r));
}

TEST(Sample, ValidatesModeProbabilitiesAndQLength) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  AugmentationPlan plan;
  plan.mode = AugmentMode::kAttachOnly;
  plan.q = {0.5, 0.5};
  EXPECT_THROW(sample(u, r, plan), std::invalid_argument);
  plan.mode = AugmentMode::kSample;
  plan.p = 1.5;
  EXPECT_THROW(sample(u, r, plan), std::invalid_argument);
  plan.p = 0.5;
  plan.q = {0.5};
  EXPECT_THROW(sample(u, r, plan), std::invalid_argument);
  plan.q = {0.5, -0.1};
  EXPECT_THROW(sample(u, r, plan), std::invalid_argument);
}

TEST(Sample, SeededDeterminismAndSensitivity) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  AugmentationPlan plan;
  plan.mode = AugmentMode::kSample;
  plan.p = 0.5;
  plan.q = {0.5, 0.5};
  plan.seed = 1234;
  const AugmentationSample first = sample_augmentation(u, r, plan);
  const AugmentationSample second = sample_augmentation(u, r, plan);
  EXPECT_EQ(first.hypergraph, second.hypergraph);
  EXPECT_EQ(first.dropped_edges, second.dropped_edges);
  EXPECT_EQ(first.attached_components, second.attached_components);

  bool any_difference = false;
  for (std::uint64_t seed = 0; seed < 16 && !any_difference; ++seed) {
    plan.seed = seed;
    any_difference = !(sample_augmentation(u, r, plan).hypergraph == first.hypergraph);
  }
  EXPECT_TRUE(any_difference);
}

TEST(Sample, KeptEdgeCountMatchesBinomialMean) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  AugmentationPlan plan;
  plan.mode = AugmentMode::kSample;
  plan.p = 0.5;
  plan.q = {0.0, 0.0};
  double kept_total = 0.0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) {
    plan.seed = static_cast<std::uint64_t>(s);
    kept_total += 9 - static_cast<int>(sample_augmentation(u, r, plan).dropped_edges.size());
  }
  const double mean = kept_total / trials;
  const double sigma = std::sqrt(9 * 0.25 / trials);
  EXPECT_NEAR(mean, 4.5, 3 * sigma);
}

TEST(ExpectedStationary, DegenerateEndpoints) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  AugmentationPlan plan;
  plan.mode = AugmentMode::kSample;
  plan.p = 0.0;
  plan.q = {0.0, 0.0};
  const StationaryEstimate unperturbed = expected_stationary(u, r, plan, 64, 5);
  const std::vector<double> base = degree_distribution(u);
  for (int v = 0; v < u.n; ++v) {
    EXPECT_DOUBLE_EQ(unperturbed.mean[v], base[v]);
    EXPECT_DOUBLE_EQ(unperturbed.std_error[v], 0.0);
  }

  plan.p = 1.0;
  plan.q = {1.0, 1.0};
  const StationaryEstimate replaced = expected_stationary(u, r, plan, 64, 5);
  const std::vector<double> target = degree_distribution(replace_components(u, r));
  for (int v = 0; v < u.n; ++v) {
    EXPECT_DOUBLE_EQ(replaced.mean[v], target[v]);
    EXPECT_DOUBLE_EQ(replaced.std_error[v], 0.0);
  }

  EXPECT_THROW(expected_stationary(u, r, plan, 0, 5), std::invalid_argument);
}

TEST(ExpectedStationary, AllDroppedNoCoverGivesZeroShares) {
  const Hypergraph c4 = complete_3_uniform(4);
  const SymmetryReport r = find_symmetries(c4, {}, 2, true);
  ASSERT_EQ(r.components.size(), 1u);
  AugmentationPlan plan;
  plan.mode = AugmentMode::kSample;
  plan.p = 1.0;
  plan.q = {0.0};
  const StationaryEstimate est = expected_stationary(c4, r, plan, 32, 9);
  for (int v = 0; v < 4; ++v) {
    EXPECT_DOUBLE_EQ(est.mean[v], 0.0);
    EXPECT_DOUBLE_EQ(est.std_error[v], 0.0);
  }
}

TEST(ExpectedStationary, MatchesExhaustiveEnumerationOracle) {
  {
    const Hypergraph c4 = complete_3_uniform(4);
    const SymmetryReport r = find_symmetries(c4, {}, 2, true);
    AugmentationPlan plan;
    plan.mode = AugmentMode::kSample;
    plan.p = 0.5;
    plan.q = {1.0};
    plan.seed = 77;
    const std::vector<double> exact = enumerate_expected_stationary(c4, r, plan.p, plan.q);
    const StationaryEstimate est = expected_stationary(c4, r, plan, 20000, 31);
    for (int v = 0; v < c4.n; ++v)
      EXPECT_NEAR(est.mean[v], exact[v], std::max(3 * est.std_error[v], 1e-12)) << "vertex " << v;
  }
  {
    const Hypergraph u = hypercycle_pair();
    const SymmetryReport r = find_symmetries(u, {}, 2, true);
    AugmentationPlan plan;
    plan.mode = AugmentMode::kSample;
    plan.p = 0.7;
    plan.q = {0.3, 0.8};
    const std::vector<double> exact = enumerate_expected_stationary(u, r, plan.p, plan.q);
    const StationaryEstimate est = expected_stationary(u, r, plan, 40000, 13);
    for (int v = 0; v < u.n; ++v)
      EXPECT_NEAR(est.mean[v], exact[v], std::max(3 * est.std_error[v], 1e-12)) << "vertex " << v;
  }
}

TEST(SolveUnbiased, ZeroDropNeedsZeroAttach) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  const UnbiasednessSolution solution = solve_unbiased(u, r, 0.0, 1e-9);
  EXPECT_TRUE(solution.feasible);
  EXPECT_TRUE(solution.exact);
  ASSERT_EQ(solution.q.size(), 2u);
  EXPECT_DOUBLE_EQ(solution.q[0], 0.0);
  EXPECT_DOUBLE_EQ(solution.q[1], 0.0);
}

TEST(SolveUnbiased, ExactBackendIsUnbiasedAtRepresentatives) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  const UnbiasednessSolution solution = solve_unbiased(u, r, 0.9, 1e-6);
  ASSERT_TRUE(solution.feasible);
  EXPECT_TRUE(solution.exact);
  for (double q : solution.q) {
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 1.0);
  }
  // Exhaustive oracle: the expectation at the solver's q matches pi at the
  // component representatives to within the solver's reported residual plus
  // enumeration roundoff.
  const std::vector<double> expected = enumerate_expected_stationary(u, r, 0.9, solution.q);
  const std::vector<double> target = degree_distribution(u);
  for (std::size_t i = 0; i < r.components.size(); ++i) {
    const int rep = r.components[i].vertex_set[0];
    EXPECT_NEAR(expected[rep], target[rep], std::abs(solution.residual[i]) + 1e-9);
  }
}

TEST(SolveUnbiased, SolutionPassesMonteCarloSelfConsistency) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  const UnbiasednessSolution solution = solve_unbiased(u, r, 0.9, 1e-6);
  ASSERT_TRUE(solution.feasible);
  AugmentationPlan plan;
  plan.mode = AugmentMode::kSample;
  plan.p = 0.9;
  plan.q = solution.q;
  const StationaryEstimate est = expected_stationary(u, r, plan, 100000, 4242);
  const std::vector<double> target = degree_distribution(u);
  for (const SymmetryComponent& c : r.components) {
    const int rep = c.vertex_set[0];
    EXPECT_LE(std::abs(est.mean[rep] - target[rep]), 3 * est.std_error[rep]) << "rep " << rep;
  }
}

TEST(SolveUnbiased, TooSmallDropProbabilityIsReportedInfeasible) {
  const Hypergraph dense = disjoint_union(
      disjoint_union(complete_3_uniform(4), complete_3_uniform(4)), path_graph(10));
  const SymmetryReport r = find_symmetries(dense, {}, kUntilConvergence, true);
  ASSERT_EQ(r.components.size(), 2u);
  const UnbiasednessSolution solution = solve_unbiased(dense, r, 0.5, 1e-6);
  EXPECT_FALSE(solution.feasible);
  ASSERT_FALSE(solution.infeasible_components.empty());
  for (int i : solution.infeasible_components) EXPECT_GT(solution.q_raw[i], 1.0 + 1e-6);
  // The verdict reports the raw value rather than silently clamping: q stays
  // within [0,1] but feasible=false flags it as unusable.
  for (double q : solution.q) {
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 1.0);
  }
}

TEST(SolveUnbiased, MonteCarloBackendAgreesWithExact) {
  const Hypergraph u = hypercycle_pair();
  const SymmetryReport r = find_symmetries(u, {}, 2, true);
  const UnbiasednessSolution exact = solve_unbiased(u, r, 0.8, 1e-6, SolveBackend::kExact);
  const UnbiasednessSolution mc =
      solve_unbiased(u, r, 0.8, 2e-3, SolveBackend::kMonteCarlo, 20000, 17);
  ASSERT_TRUE(exact.feasible);
  ASSERT_TRUE(mc.feasible);
  EXPECT_TRUE(exact.exact);
  EXPECT_FALSE(mc.exact);
  // Both backends must land on q values whose exact expectation is close to
  // the target; compare through the enumeration oracle rather than q itself.
  // Bound: the solver's tolerance plus a 3-sigma allowance for the Monte
  // Carlo noise in its stopping rule (shares at 20000 samples).
  const std::vector<double> target = degree_distribution(u);
  const std::vector<double> via_mc = enumerate_expected_stationary(u, r, 0.8, mc.q);
  for (std::size_t i = 0; i < r.components.size(); ++i) {
    const int rep = r.components[i].vertex_set[0];
    EXPECT_LE(std::abs(via_mc[rep] - target[rep]), 4e-3) << "component " << i;
  }
}

TEST(SolveUnbiased, MonteCarloHandlesLargeComponentCount) {
  // 25 droppable edges exceeds the exact-enumeration budget, forcing the
  // auto backend onto Monte Carlo.
  const Hypergraph big = hypercycle_3_uniform(25);
  const SymmetryReport r = find_symmetries(big, {}, 2, true);
  ASSERT_EQ(r.components.size(), 1u);
  ASSERT_EQ(r.components[0].edge_ids.size(), 25u);
  const UnbiasednessSolution solution = solve_unbiased(big, r, 0.5, 2e-3);
  EXPECT_FALSE(solution.exact);
  EXPECT_TRUE(solution.feasible);
  EXPECT_LE(std::abs(solution.residual[0]), 2e-3);
}

TEST(Invariance, OrbitMatesKeepEqualColorsAfterAttachment) {
  for (const NamedHypergraph& fixture : corpus_n8()) {
    const SymmetryReport r = find_symmetries(fixture.hypergraph, {}, kUntilConvergence, true);
    const Hypergraph augmented = attach_covers(fixture.hypergraph, r);
    const std::vector<int> colors = gwl1(augmented, {}, kUntilConvergence).node_colors.back();
    const OrbitPartition orbits = automorphisms(fixture.hypergraph, 8);
    for (const std::vector<int>& orbit : orbits.orbits)
      for (int v : orbit)
        EXPECT_EQ(colors[v], colors[orbit[0]])
            << fixture.name << ": orbit of " << orbit[0] << " split by augmentation";
  }
}

TEST(Validation, ReportsForeignToTheHypergraphAreRejected) {
  const Hypergraph u = hypercycle_pair();
  SymmetryReport bogus;
  SymmetryComponent c;
  c.class_id = 0;
  c.vertex_set = {0, 1, 2, 3};
  c.edge_ids = {0, 99};
  c.size = 4;
  bogus.components.push_back(c);
  EXPECT_THROW(attach_covers(u, bogus), std::invalid_argument);

  SymmetryReport overlapping;
  c.edge_ids = {0};
  overlapping.components.push_back(c);
  c.vertex_set = {3, 4, 5};
  c.size = 3;
  overlapping.components.push_back(c);
  EXPECT_THROW(attach_covers(u, overlapping), std::invalid_argument);
}

}  // namespace
}  // namespace hypersym
