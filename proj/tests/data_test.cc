#include "hypersym/data.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <vector>

#include "hypersym/generators.hpp"
#include "hypersym/json_io.hpp"
#include "hypersym/rng.hpp"

namespace hypersym {
namespace {

TemporalHypergraph parse(const std::string& nverts, const std::string& simplices,
                         const std::string& times, ParseStats* stats = nullptr) {
  std::istringstream a(nverts), b(simplices), c(times);
  return parse_simplex_list(a, b, c, stats);
}

TEST(ParseSimplexList, SingleTriple) {
  const TemporalHypergraph th = parse("3", "1 2 3", "5.0");
  EXPECT_EQ(th.hypergraph.n, 3);
  EXPECT_EQ(th.hypergraph.edges, (std::vector<std::vector<int>>{{0, 1, 2}}));
  EXPECT_EQ(th.timestamps, (std::vector<double>{5.0}));
}

TEST(ParseSimplexList, DuplicateKeepsEarliestTimestamp) {
  ParseStats stats;
  const TemporalHypergraph th = parse("2 2", "1 2 1 2", "2.0 1.0", &stats);
  EXPECT_EQ(th.hypergraph.edges, (std::vector<std::vector<int>>{{0, 1}}));
  EXPECT_EQ(th.timestamps, (std::vector<double>{1.0}));
  EXPECT_EQ(stats.duplicates_merged, 1);
}

TEST(ParseSimplexList, DropsSingletonsWithCount) {
  ParseStats stats;
  const TemporalHypergraph th = parse("1 2 1", "4 1 2 9", "0 1 2", &stats);
  EXPECT_EQ(th.hypergraph.edges, (std::vector<std::vector<int>>{{0, 1}}));
  EXPECT_EQ(stats.singletons_dropped, 2);
  // Density: ids {4,1,2,9} densify to ranks, so n counts distinct raw ids.
  EXPECT_EQ(th.hypergraph.n, 4);
}

TEST(ParseSimplexList, DensifiesSparseOneBasedIds) {
  const TemporalHypergraph th = parse("2 2", "5 9 7 9", "1 2");
  EXPECT_EQ(th.hypergraph.n, 3);
  EXPECT_EQ(th.hypergraph.edges, (std::vector<std::vector<int>>{{0, 2}, {1, 2}}));
}

TEST(ParseSimplexList, ReportsMalformedInputs) {
  EXPECT_THROW(parse("3", "1 2", "1.0"), std::invalid_argument);
  EXPECT_THROW(parse("2 2", "1 2 1 2", "1.0"), std::invalid_argument);
  try {
    parse("2", "1 abc", "1.0");
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
  }
  EXPECT_THROW(parse("2", "0 1", "1.0"), std::invalid_argument);  // ids are 1-based
}

TEST(ParseSimplexList, EmitThenParseRoundTrips) {
  Rng rng(42);
  const Hypergraph h = random_hypergraph(9, 7, 4, rng, false);
  TemporalHypergraph th;
  th.hypergraph = h;
  for (int e = 0; e < h.m(); ++e) th.timestamps.push_back(0.5 * e + 0.125);
  std::ostringstream a, b, c;
  emit_simplex_list(th, a, b, c);
  const TemporalHypergraph back = parse(a.str(), b.str(), c.str());
  EXPECT_TRUE(back == th);
}

TEST(NearestRankPercentile, Examples) {
  const std::vector<double> decade{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_DOUBLE_EQ(nearest_rank_percentile(decade, 0.80), 8.0);
  EXPECT_DOUBLE_EQ(nearest_rank_percentile(decade, 0.85), 9.0);
  EXPECT_DOUBLE_EQ(nearest_rank_percentile(decade, 1.00), 10.0);
  EXPECT_DOUBLE_EQ(nearest_rank_percentile({3, 1, 2}, 0.5), 2.0);
  EXPECT_THROW(nearest_rank_percentile({}, 0.5), std::invalid_argument);
}

TemporalHypergraph ten_edge_fixture() {
  // 12 vertices, ten pair edges with timestamps 1..10 plus two triangles used
  // as size-3 material in train.
  std::vector<std::vector<int>> edges;
  std::vector<double> times;
  for (int i = 0; i < 10; ++i) {
    edges.push_back({i, i + 1});
    times.push_back(i + 1.0);
  }
  edges.push_back({0, 1, 2});
  times.push_back(2.0);
  edges.push_back({3, 4, 5});
  times.push_back(3.0);
  edges.push_back({6, 7, 8});
  times.push_back(4.0);
  edges.push_back({9, 10, 11});
  times.push_back(5.0);
  return make_temporal(12, edges, times);
}

TEST(TemporalSplit, NearestRankBoundaries) {
  TemporalHypergraph th;
  std::vector<std::vector<int>> edges;
  std::vector<double> times;
  for (int i = 0; i < 10; ++i) {
    edges.push_back({i, i + 1});
    times.push_back(i + 1.0);
  }
  th = make_temporal(11, edges, times);
  SplitSpec spec;
  const LinkPredictionSplit split = temporal_split(th, spec);
  EXPECT_EQ(split.train.observed.size(), 8u);  // t in {1..8}
  EXPECT_EQ(split.val.observed.size(), 1u);    // t = 9
  EXPECT_EQ(split.test.observed.size(), 1u);   // t = 10
  EXPECT_EQ(split.train.positives.size(), 0u);
}

TEST(TemporalSplit, EqualTimestampsAllLandInTrain) {
  const TemporalHypergraph th =
      make_temporal(4, {{0, 1}, {1, 2}, {2, 3}}, {7.0, 7.0, 7.0});
  const LinkPredictionSplit split = temporal_split(th, SplitSpec{});
  EXPECT_EQ(split.train.observed.size(), 3u);
  EXPECT_TRUE(split.val.observed.empty() && split.val.positives.empty());
  EXPECT_TRUE(split.test.observed.empty() && split.test.positives.empty());
}

TEST(TemporalSplit, HalfOfSizeKEdgesBecomePositives) {
  const TemporalHypergraph th = ten_edge_fixture();
  SplitSpec spec;
  spec.seed = 11;
  const LinkPredictionSplit split = temporal_split(th, spec);
  // All four triangles carry t <= 5 < P80, so they are train material.
  EXPECT_EQ(split.train.positives.size(), 2u);
  std::vector<std::vector<int>> recombined = split.train.positives;
  for (const std::vector<int>& e : split.train.observed)
    if (e.size() == 3) recombined.push_back(e);
  std::sort(recombined.begin(), recombined.end());
  const std::vector<std::vector<int>> expected = {
      {0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {9, 10, 11}};
  EXPECT_EQ(recombined, expected);
  // Negatives: one per positive at ratio 1, none colliding with any edge.
  EXPECT_EQ(split.train.negatives.size(), 2u);
  for (const std::vector<int>& neg : split.train.negatives) {
    EXPECT_EQ(neg.size(), 3u);
    EXPECT_FALSE(std::binary_search(th.hypergraph.edges.begin(), th.hypergraph.edges.end(), neg));
  }
}

TEST(TemporalSplit, DeterministicAndSeedSensitive) {
  const TemporalHypergraph th = ten_edge_fixture();
  SplitSpec spec;
  spec.seed = 5;
  const LinkPredictionSplit a = temporal_split(th, spec);
  const LinkPredictionSplit b = temporal_split(th, spec);
  EXPECT_EQ(a.train.observed, b.train.observed);
  EXPECT_EQ(a.train.positives, b.train.positives);
  EXPECT_EQ(a.train.negatives, b.train.negatives);

  bool any_difference = false;
  for (std::uint64_t seed = 0; seed < 32 && !any_difference; ++seed) {
    spec.seed = seed;
    const LinkPredictionSplit c = temporal_split(th, spec);
    any_difference = c.train.positives != a.train.positives || c.train.negatives != a.train.negatives;
  }
  EXPECT_TRUE(any_difference);
}

TEST(TemporalSplit, RaisingTrainPercentileOnlyAddsToTrain) {
  const TemporalHypergraph th = ten_edge_fixture();
  SplitSpec narrow;
  narrow.train_pct = 0.60;
  narrow.val_pct = 0.80;
  SplitSpec wide;
  wide.train_pct = 0.90;
  wide.val_pct = 0.95;
  const auto train_edges = [](const LinkPredictionSplit& s) {
    std::vector<std::vector<int>> all = s.train.observed;
    all.insert(all.end(), s.train.positives.begin(), s.train.positives.end());
    std::sort(all.begin(), all.end());
    return all;
  };
  const std::vector<std::vector<int>> small = train_edges(temporal_split(th, narrow));
  const std::vector<std::vector<int>> large = train_edges(temporal_split(th, wide));
  EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
}

TEST(TemporalSplit, ValidatesInputs) {
  const TemporalHypergraph th = ten_edge_fixture();
  TemporalHypergraph empty;
  empty.hypergraph = build(3, {});
  EXPECT_THROW(temporal_split(empty, SplitSpec{}), std::invalid_argument);
  SplitSpec bad;
  bad.train_pct = 0.9;
  bad.val_pct = 0.8;
  EXPECT_THROW(temporal_split(th, bad), std::invalid_argument);
  bad = SplitSpec{};
  bad.target_size = 1;
  EXPECT_THROW(temporal_split(th, bad), std::invalid_argument);
  bad = SplitSpec{};
  bad.negative_ratio = -1.0;
  EXPECT_THROW(temporal_split(th, bad), std::invalid_argument);
}

TEST(NegativeSample, ShortfallWhenNoNegativesExist) {
  const NegativeSampleResult res = negative_sample(complete_3_uniform(4), 3, 5, 1);
  EXPECT_TRUE(res.samples.empty());
  EXPECT_EQ(res.shortfall, 5);
}

TEST(NegativeSample, FindsTheOnlyCandidate) {
  const NegativeSampleResult res = negative_sample(triangle(), 3, 1, 9);
  ASSERT_EQ(res.samples.size(), 1u);
  EXPECT_EQ(res.samples[0], (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(res.shortfall, 0);

  const NegativeSampleResult more = negative_sample(triangle(), 3, 5, 9);
  EXPECT_EQ(more.samples.size(), 1u);
  EXPECT_EQ(more.shortfall, 4);
}

TEST(NegativeSample, DistinctSortedNonEdgesAndDeterministic) {
  Rng rng(3);
  const Hypergraph h = random_hypergraph(8, 9, 3, rng, false);
  const NegativeSampleResult a = negative_sample(h, 3, 20, 77);
  const NegativeSampleResult b = negative_sample(h, 3, 20, 77);
  EXPECT_EQ(a.samples, b.samples);
  std::set<std::vector<int>> seen;
  for (const std::vector<int>& s : a.samples) {
    EXPECT_EQ(s.size(), 3u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_TRUE(seen.insert(s).second);
    EXPECT_FALSE(std::binary_search(h.edges.begin(), h.edges.end(), s));
    for (int v : s) {
      EXPECT_GE(v, 0);
      EXPECT_LT(v, 8);
    }
  }
  // C(8,3)=56 minus size-3 edges: the exact-enumeration path can fill 20.
  EXPECT_EQ(a.shortfall, 0);
}

TEST(NegativeSample, RejectionPathHandlesLargeUniverses) {
  // C(50,5) ~ 2.1M exceeds the exact-enumeration bound, forcing rejection
  // sampling; the result contract stays the same.
  std::vector<std::vector<int>> edges;
  for (int i = 0; i + 4 < 50; i += 5) edges.push_back({i, i + 1, i + 2, i + 3, i + 4});
  const Hypergraph h = build(50, edges);
  const NegativeSampleResult a = negative_sample(h, 5, 100, 123);
  const NegativeSampleResult b = negative_sample(h, 5, 100, 123);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.samples.size(), 100u);
  EXPECT_EQ(a.shortfall, 0);
  std::set<std::vector<int>> seen;
  for (const std::vector<int>& s : a.samples) {
    EXPECT_TRUE(seen.insert(s).second);
    EXPECT_FALSE(std::binary_search(h.edges.begin(), h.edges.end(), s));
  }
}

TEST(NegativeSample, ValidatesArguments) {
  EXPECT_THROW(negative_sample(triangle(), 4, 1, 0), std::invalid_argument);
  EXPECT_THROW(negative_sample(triangle(), 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(negative_sample(triangle(), 2, -1, 0), std::invalid_argument);
  const NegativeSampleResult none = negative_sample(triangle(), 2, 0, 0);
  EXPECT_TRUE(none.samples.empty());
  EXPECT_EQ(none.shortfall, 0);
}

TEST(NoLeakage, NegativesNeverCollideWithAnySplitEdge) {
  const TemporalHypergraph th = ten_edge_fixture();
  SplitSpec spec;
  spec.seed = 21;
  const LinkPredictionSplit split = temporal_split(th, spec);
  for (const SplitPart* part : {&split.train, &split.val, &split.test}) {
    for (const std::vector<int>& neg : part->negatives) {
      EXPECT_FALSE(
          std::binary_search(th.hypergraph.edges.begin(), th.hypergraph.edges.end(), neg));
    }
  }
}

TEST(JsonIo, RoundTripWithTimestamps) {
  Rng rng(8);
  TemporalHypergraph th;
  th.hypergraph = random_hypergraph(6, 5, 3, rng, false);
  for (int e = 0; e < th.hypergraph.m(); ++e) th.timestamps.push_back(e * 1.5);
  const nlohmann::json j = temporal_to_json(th);
  const JsonHypergraphResult back = hypergraph_from_json(j);
  EXPECT_TRUE(back.temporal == th);
  EXPECT_TRUE(back.had_timestamps);
}

TEST(JsonIo, SynthesizesInputOrderTimestampsWhenAbsent) {
  const nlohmann::json j = {{"n", 3}, {"edges", {{2, 1}, {0, 1}}}};
  const JsonHypergraphResult res = hypergraph_from_json(j);
  EXPECT_FALSE(res.had_timestamps);
  EXPECT_EQ(res.temporal.hypergraph.edges, (std::vector<std::vector<int>>{{0, 1}, {1, 2}}));
  // Edge {2,1} arrived first (t=0); canonical ordering re-sorts the edges but
  // the synthetic integer timestamps follow the input order.
  EXPECT_EQ(res.temporal.timestamps, (std::vector<double>{1.0, 0.0}));
}

TEST(JsonIo, RejectsMalformedDocuments) {
  std::istringstream garbage("{ not json");
  EXPECT_THROW(hypergraph_from_json_stream(garbage), std::invalid_argument);
  EXPECT_THROW(hypergraph_from_json(nlohmann::json{{"edges", {{0, 1}}}}), std::invalid_argument);
  EXPECT_THROW(hypergraph_from_json(nlohmann::json{{"n", 2}}), std::invalid_argument);
  EXPECT_THROW(hypergraph_from_json(nlohmann::json{{"n", 2}, {"edges", "zap"}}),
               std::invalid_argument);
  EXPECT_THROW(
      hypergraph_from_json(nlohmann::json{{"n", 2}, {"edges", {{0, 1}}}, {"timestamps", {1, 2}}}),
      std::invalid_argument);
}

TEST(JsonIo, DeterministicDumpSortsKeysAndPrintsFullPrecision) {
  nlohmann::json j;
  j["beta"] = 0.1;
  j["alpha"] = nlohmann::json::array({1, 2});
  j["gamma"] = nlohmann::json::object();
  const std::string text = dump_deterministic(j);
  EXPECT_EQ(text,
            "{\n  \"alpha\": [\n    1,\n    2\n  ],\n  \"beta\": "
            "0.10000000000000001,\n  \"gamma\": {}\n}\n");
  EXPECT_EQ(text, dump_deterministic(j));
}

}  // namespace
}  // namespace hypersym
