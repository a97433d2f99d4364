// hypersym: command-line toolkit around the hypersym headers.
//
// Subcommands: validate, refine, find-symmetry, augment, split, stats,
// verify. Exit codes: 0 success, 1 verification failure, 2 usage/IO error.
// All randomized subcommands default to seed 0 and echo the seed in their
// provenance; --strict demands an explicit --seed. JSON output is
// deterministic (sorted keys, %.17g floats).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hypersym/augment.hpp"
#include "hypersym/core.hpp"
#include "hypersym/data.hpp"
#include "hypersym/generators.hpp"
#include "hypersym/json_io.hpp"
#include "hypersym/oracle.hpp"
#include "hypersym/refine.hpp"
#include "hypersym/symmetry.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedInput {
  hypersym::TemporalHypergraph temporal;
  bool had_timestamps = false;
  hypersym::ParseStats stats;
  std::string name;
};

std::string stem_of(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  const std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base;
}

bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

// --format auto resolves to simplex when <input>-nverts.txt exists (the input
// is then the dataset prefix), JSON otherwise.
LoadedInput load_input(const std::string& path, const std::string& format) {
  std::string resolved = format;
  if (resolved == "auto") {
    if (file_exists(path + "-nverts.txt"))
      resolved = "simplex";
    else if (file_exists(path))
      resolved = "json";
    else
      throw UsageError("cannot read input '" + path + "'");
  }
  LoadedInput input;
  if (resolved == "simplex") {
    std::ifstream nverts(path + "-nverts.txt");
    std::ifstream simplices(path + "-simplices.txt");
    std::ifstream times(path + "-times.txt");
    if (!nverts.good() || !simplices.good() || !times.good())
      throw UsageError("cannot read simplex-list triple with prefix '" + path + "'");
    input.temporal = hypersym::parse_simplex_list(nverts, simplices, times, &input.stats);
    input.had_timestamps = true;
    input.name = stem_of(path);
    return input;
  }
  if (resolved != "json") throw UsageError("unknown format '" + resolved + "'");
  std::ifstream in(path);
  if (!in.good()) throw UsageError("cannot read input '" + path + "'");
  hypersym::JsonHypergraphResult parsed = hypersym::hypergraph_from_json_stream(in);
  input.temporal = std::move(parsed.temporal);
  input.had_timestamps = parsed.had_timestamps;
  input.stats = parsed.stats;
  input.name = stem_of(path);
  return input;
}

void write_output(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output_path);
  if (!out.good()) throw UsageError("cannot write output '" + output_path + "'");
  out << text;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("HYPERSYM_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

int parse_iterations(const std::string& text) {
  if (text == "conv") return hypersym::kUntilConvergence;
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used != text.size() || value < 1) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw UsageError("--L must be a positive integer or 'conv'; got '" + text + "'");
  }
}

json report_to_json(const hypersym::SymmetryReport& report) {
  json j;
  j["L_used"] = report.L_used;
  j["guard_enabled"] = report.guard_enabled;
  j["components_examined"] = report.components_examined;
  j["components"] = json::array();
  for (const hypersym::SymmetryComponent& c : report.components) {
    json jc;
    jc["class_id"] = c.class_id;
    jc["vertices"] = c.vertex_set;
    jc["edge_ids"] = c.edge_ids;
    jc["size"] = c.size;
    j["components"].push_back(jc);
  }
  return j;
}

// ---------------------------------------------------------------- validate

int run_validate(const LoadedInput& input, const std::string& output_path) {
  const hypersym::Hypergraph& h = input.temporal.hypergraph;
  json j;
  j["n"] = h.n;
  j["m"] = h.m();
  j["nnz"] = h.nnz;
  j["connected"] = hypersym::is_connected(h);
  j["components"] = hypersym::connected_components(h).count;
  j["singletons_dropped"] = input.stats.singletons_dropped;
  j["duplicates_merged"] = input.stats.duplicates_merged;
  j["valid"] = true;
  write_output(hypersym::dump_deterministic(j), output_path);
  return 0;
}

// ------------------------------------------------------------------ refine

int run_refine(const LoadedInput& input, const std::string& L_text, int threads,
               const std::string& output_path) {
  const hypersym::Hypergraph& h = input.temporal.hypergraph;
  const int L = parse_iterations(L_text);
  const hypersym::ColorHistory history = hypersym::gwl1(h, {}, L, threads);
  json j;
  j["n"] = h.n;
  j["m"] = h.m();
  j["iterations"] = history.iterations();
  if (history.converged_at)
    j["converged_at"] = *history.converged_at;
  else
    j["converged_at"] = nullptr;
  j["node_colors"] = history.node_colors;
  j["edge_colors"] = history.edge_colors;
  json counts = json::array();
  for (std::size_t i = 0; i < history.node_colors.size(); ++i) {
    json row;
    row["iteration"] = i;
    row["node_classes"] = hypersym::detail::count_colors(history.node_colors[i]);
    row["edge_classes"] = hypersym::detail::count_colors(history.edge_colors[i]);
    counts.push_back(row);
  }
  j["class_counts"] = counts;
  write_output(hypersym::dump_deterministic(j), output_path);
  return 0;
}

// ----------------------------------------------------------- find-symmetry

int run_find_symmetry(const LoadedInput& input, const std::string& L_text, bool guard,
                      int threads, const std::string& output_path) {
  const hypersym::Hypergraph& h = input.temporal.hypergraph;
  const int L = parse_iterations(L_text);
  const hypersym::SymmetryReport report = hypersym::find_symmetries(h, {}, L, guard, threads);
  write_output(hypersym::dump_deterministic(report_to_json(report)), output_path);
  return 0;
}

// ----------------------------------------------------------------- augment

std::vector<double> parse_q(const std::string& text, std::size_t components) {
  std::vector<double> q;
  if (!text.empty() && text[0] == '@') {
    std::ifstream in(text.substr(1));
    if (!in.good()) throw UsageError("cannot read q file '" + text.substr(1) + "'");
    double value = 0.0;
    while (in >> value) q.push_back(value);
    if (q.size() != components)
      throw UsageError("q file holds " + std::to_string(q.size()) + " values for " +
                       std::to_string(components) + " components");
    return q;
  }
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    q.assign(components, value);
  } catch (const std::exception&) {
    throw UsageError("--q must be a number or @file; got '" + text + "'");
  }
  return q;
}

int run_augment(const LoadedInput& input, const std::string& mode, const std::string& L_text,
                bool guard, double p, const std::string& q_text, std::uint64_t seed,
                int n_samples, int threads, const std::string& output_path) {
  const hypersym::Hypergraph& h = input.temporal.hypergraph;
  const int L = parse_iterations(L_text);
  const hypersym::SymmetryReport report = hypersym::find_symmetries(h, {}, L, guard, threads);
  const std::vector<double> q = parse_q(q_text, report.components.size());

  hypersym::Hypergraph augmented;
  json provenance;
  provenance["mode"] = mode;
  provenance["p"] = p;
  provenance["q"] = q;
  provenance["seed"] = seed;
  provenance["L_used"] = report.L_used;
  provenance["guard"] = report.guard_enabled;

  std::vector<int> all_components(report.components.size());
  for (std::size_t i = 0; i < all_components.size(); ++i) all_components[i] = static_cast<int>(i);
  std::vector<int> all_edges;
  for (const hypersym::SymmetryComponent& c : report.components)
    all_edges.insert(all_edges.end(), c.edge_ids.begin(), c.edge_ids.end());
  std::sort(all_edges.begin(), all_edges.end());

  if (mode == "attach") {
    augmented = hypersym::attach_covers(h, report);
    provenance["dropped_edges"] = json::array();
    provenance["added_covers"] = all_components;
  } else if (mode == "replace") {
    augmented = hypersym::replace_components(h, report);
    provenance["dropped_edges"] = all_edges;
    provenance["added_covers"] = all_components;
  } else if (mode == "sample") {
    hypersym::AugmentationPlan plan;
    plan.p = p;
    plan.q = q;
    plan.seed = seed;
    plan.mode = hypersym::AugmentMode::kSample;
    const hypersym::AugmentationSample drawn = hypersym::sample_augmentation(h, report, plan);
    augmented = drawn.hypergraph;
    provenance["dropped_edges"] = drawn.dropped_edges;
    provenance["added_covers"] = drawn.attached_components;
  } else {
    throw UsageError("--mode must be attach, replace, or sample; got '" + mode + "'");
  }

  json j;
  j["hypergraph"] = hypersym::hypergraph_to_json(augmented);
  j["provenance"] = provenance;
  if (n_samples > 0) {
    hypersym::AugmentationPlan plan;
    plan.p = mode == "sample" ? p : (mode == "replace" ? 1.0 : 0.0);
    plan.q = mode == "sample" ? q : std::vector<double>(report.components.size(), 1.0);
    plan.seed = seed;
    plan.mode = hypersym::AugmentMode::kSample;
    const hypersym::StationaryEstimate est =
        hypersym::expected_stationary(h, report, plan, n_samples, seed);
    json diag;
    diag["samples"] = est.samples;
    diag["mean"] = est.mean;
    diag["std_error"] = est.std_error;
    diag["degree_share"] = hypersym::degree_distribution(h);
    j["expected_stationary"] = diag;
  }
  write_output(hypersym::dump_deterministic(j), output_path);
  return 0;
}

// ------------------------------------------------------------------- split

int run_split(const LoadedInput& input, double train_pct, double val_pct, int target_size,
              double negative_ratio, std::uint64_t seed, const std::string& output_path) {
  hypersym::SplitSpec spec;
  spec.train_pct = train_pct;
  spec.val_pct = val_pct;
  spec.target_size = target_size;
  spec.negative_ratio = negative_ratio;
  spec.seed = seed;
  const hypersym::LinkPredictionSplit split = hypersym::temporal_split(input.temporal, spec);
  const auto part_to_json = [](const hypersym::SplitPart& part) {
    json j;
    j["observed"] = part.observed;
    j["positives"] = part.positives;
    j["negatives"] = part.negatives;
    j["negative_shortfall"] = part.negative_shortfall;
    return j;
  };
  json j;
  j["seed"] = seed;
  j["target_size"] = target_size;
  j["train"] = part_to_json(split.train);
  j["val"] = part_to_json(split.val);
  j["test"] = part_to_json(split.test);
  write_output(hypersym::dump_deterministic(j), output_path);
  return 0;
}

// ------------------------------------------------------------------- stats

int run_stats(const std::vector<std::string>& paths, const std::string& format,
              const std::string& L_text, bool guard, int threads,
              const std::string& output_path) {
  const int L = parse_iterations(L_text);
  std::vector<hypersym::SymmetryReport> reports;
  std::vector<hypersym::Hypergraph> hs;
  std::vector<std::string> names;
  for (const std::string& path : paths) {
    LoadedInput input = load_input(path, format);
    reports.push_back(
        hypersym::find_symmetries(input.temporal.hypergraph, {}, L, guard, threads));
    hs.push_back(std::move(input.temporal.hypergraph));
    names.push_back(input.name);
  }
  const std::vector<hypersym::StatsRow> rows = hypersym::component_statistics(reports, hs, names);
  write_output(hypersym::stats_csv(rows), output_path);
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyContext {
  bool failed = false;
  void check(const std::string& name, bool ok, const json& detail = {}) {
    if (ok) {
      std::cout << "ok: " << name << "\n";
    } else {
      failed = true;
      std::cout << "FAIL: " << name;
      if (!detail.is_null() && !detail.empty()) std::cout << " " << detail.dump();
      std::cout << "\n";
    }
  }
};

json duality_counterexample_json(const hypersym::DualityVerdict& verdict) {
  if (verdict.pass || !verdict.counterexample) return {};
  const hypersym::DualityCounterexample& c = *verdict.counterexample;
  json j;
  j["edge_pair"] = c.edge_pair;
  j["first"] = c.first;
  j["second"] = c.second;
  j["colors_equal"] = c.colors_equal;
  j["codes_equal"] = c.codes_equal;
  j["iteration"] = c.iteration;
  return j;
}

int run_verify(const std::optional<std::string>& input_path, const std::string& format,
               int cap) {
  using namespace hypersym;
  VerifyContext ctx;

  // Universal-cover duality on the standing fixture pairs.
  const Hypergraph c4 = complete_3_uniform(4);
  const Hypergraph c5 = hypercycle_3_uniform(5);
  const Hypergraph t = filled_triangle();
  const Hypergraph c3 = triangle();
  for (int i = 1; i <= 3; ++i) {
    const DualityVerdict verdict = verify_duality(c4, c5, i);
    ctx.check("duality C4_3 vs C5_3 at i=" + std::to_string(i), verdict.pass,
              duality_counterexample_json(verdict));
  }
  for (int i = 1; i <= 2; ++i) {
    const DualityVerdict verdict = verify_duality(t, c3, i);
    ctx.check("duality filled triangle vs triangle at i=" + std::to_string(i), verdict.pass,
              duality_counterexample_json(verdict));
  }
  {
    const DualityVerdict verdict = verify_duality(c5, c5, 2);
    ctx.check("duality reflexivity C5_3", verdict.pass, duality_counterexample_json(verdict));
  }

  // Brute-force automorphism facts.
  {
    const OrbitPartition orbits = automorphisms(c3);
    ctx.check("triangle has one orbit and |Aut| = 6",
              orbits.orbits.size() == 1 && orbits.group_size == 6);
  }
  {
    const Hypergraph path = path_hypergraph();
    const OrbitPartition orbits = automorphisms(path);
    ctx.check("path {{0,1},{1,2}} has orbits {0,2},{1} and |Aut| = 2",
              orbits.orbits.size() == 2 && orbits.group_size == 2);
    ctx.check("path k-set isomorphism {0,1} ~ {1,2}", k_set_isomorphic(path, {0, 1}, {1, 2}));
    ctx.check("path k-set non-isomorphism {0,1} !~ {0,2}",
              !k_set_isomorphic(path, {0, 1}, {0, 2}));
  }
  {
    const OrbitPartition orbits = automorphisms(c4);
    ctx.check("complete 3-uniform on 4 vertices: one orbit, |Aut| = 24",
              orbits.orbits.size() == 1 && orbits.group_size == 24);
  }

  // The limitation exhibit and its repair.
  {
    const Hypergraph u = disjoint_union(c4, c5);
    const ColorHistory before = gwl1(u, {}, kUntilConvergence);
    const OrbitPartition orbits = automorphisms(u, 9);
    const SymmetryReport report = find_symmetries(u, {}, kUntilConvergence);
    const ColorHistory after = gwl1(attach_covers(u, report), {}, kUntilConvergence);
    ctx.check("C4_3 + C5_3: one converged class",
              detail::count_colors(before.final_node_colors()) == 1);
    ctx.check("C4_3 + C5_3: two automorphism orbits", orbits.orbits.size() == 2);
    ctx.check("C4_3 + C5_3: attaching covers splits the class in two",
              detail::count_colors(after.final_node_colors()) == 2);
  }

  if (input_path) {
    const LoadedInput input = load_input(*input_path, format);
    const Hypergraph& h = input.temporal.hypergraph;
    const std::string name = input.name;
    const SymmetryReport report = find_symmetries(h, {}, kUntilConvergence);
    if (h.n <= cap) {
      const OrbitPartition orbits = automorphisms(h, cap);
      const ColorHistory history = gwl1(h, {}, kUntilConvergence);
      const std::vector<int>& colors = history.final_node_colors();
      bool invariant = true;
      for (const std::vector<int>& orbit : orbits.orbits)
        for (int v : orbit)
          if (colors[v] != colors[orbit.front()]) invariant = false;
      ctx.check(name + ": refinement colors constant on automorphism orbits", invariant);
      bool regular = true;
      for (const SymmetryComponent& c : report.components) {
        const InducedSubhypergraph induced = induced_subhypergraph(h, c.vertex_set);
        if (!neighborhood_regular(induced.hypergraph, cap)) regular = false;
      }
      ctx.check(name + ": reported components are neighborhood-regular", regular);
    }
    if (is_connected(h) && h.n + h.m() <= 4000) {
      const DualityVerdict verdict = verify_duality(h, h, 2);
      ctx.check(name + ": duality reflexivity", verdict.pass,
                duality_counterexample_json(verdict));
    }
    ctx.check(name + ": report examined as many components as it could",
              report.components_examined >= static_cast<int>(report.components.size()));
  }

  std::cout << (ctx.failed ? "verification FAILED\n" : "all checks passed\n");
  return ctx.failed ? 1 : 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"hypersym: symmetry finding, refinement, and augmentation on hypergraphs"};
  app.require_subcommand(1);

  std::string input_path, output_path, format = "auto", L_text = "conv";
  std::string mode = "attach", q_text = "1";
  std::vector<std::string> stats_inputs;
  double p = 0.0, train_pct = 0.80, val_pct = 0.85, negative_ratio = 1.0;
  int target_size = 3, threads = 0, n_samples = 0, cap = 8;
  std::uint64_t seed = 0;
  bool guard = true, strict = false;

  const auto add_common = [&](CLI::App* cmd, bool with_input = true) {
    if (with_input) cmd->add_option("--input", input_path, "Input path")->required();
    cmd->add_option("--format", format, "Input format: auto, json, simplex")
        ->check(CLI::IsMember({"auto", "json", "simplex"}));
    cmd->add_option("--output", output_path, "Output path (default stdout)");
    cmd->add_option("--threads", threads, "Worker threads (or HYPERSYM_THREADS)");
  };

  CLI::App* validate = app.add_subcommand("validate", "Parse and check a hypergraph");
  add_common(validate);

  CLI::App* refine = app.add_subcommand("refine", "Run color refinement");
  add_common(refine);
  refine->add_option("--L", L_text, "Iterations: positive integer or 'conv'");

  CLI::App* find_symmetry = app.add_subcommand("find-symmetry", "Report symmetric components");
  add_common(find_symmetry);
  find_symmetry->add_option("--L", L_text, "Iterations: positive integer or 'conv'");
  find_symmetry->add_flag("--guard,!--no-guard", guard, "Degree-multiset guard (default on)");

  CLI::App* augment = app.add_subcommand("augment", "Attach, replace, or sample covers");
  add_common(augment);
  augment->add_option("--mode", mode, "attach, replace, or sample")
      ->check(CLI::IsMember({"attach", "replace", "sample"}));
  augment->add_option("--p", p, "Drop probability for component hyperedges");
  augment->add_option("--q", q_text, "Attach probability: number or @file");
  augment->add_option("--seed", seed, "RNG seed (default 0, echoed in provenance)");
  augment->add_option("--samples", n_samples, "Also estimate the expected stationary distribution");
  augment->add_option("--L", L_text, "Iterations: positive integer or 'conv'");
  augment->add_flag("--guard,!--no-guard", guard, "Degree-multiset guard (default on)");
  augment->add_flag("--strict", strict, "Require an explicit --seed");

  CLI::App* split = app.add_subcommand("split", "Temporal train/val/test split");
  add_common(split);
  split->add_option("--train-pct", train_pct, "Train percentile (default 0.80)");
  split->add_option("--val-pct", val_pct, "Validation percentile (default 0.85)");
  split->add_option("--k", target_size, "Target hyperedge size (default 3)");
  split->add_option("--negative-ratio", negative_ratio, "Negatives per positive (default 1)");
  split->add_option("--seed", seed, "RNG seed (default 0, echoed in output)");
  split->add_flag("--strict", strict, "Require an explicit --seed");

  CLI::App* stats = app.add_subcommand("stats", "Symmetric-component statistics CSV");
  stats->add_option("--input", stats_inputs, "Input paths")->required();
  stats->add_option("--format", format, "Input format: auto, json, simplex")
      ->check(CLI::IsMember({"auto", "json", "simplex"}));
  stats->add_option("--output", output_path, "Output path (default stdout)");
  stats->add_option("--threads", threads, "Worker threads (or HYPERSYM_THREADS)");
  stats->add_option("--L", L_text, "Iterations: positive integer or 'conv'");
  stats->add_flag("--guard,!--no-guard", guard, "Degree-multiset guard (default on)");

  CLI::App* verify = app.add_subcommand("verify", "Run the exact-oracle suite");
  verify->add_flag("--fixtures", "Run the built-in fixture checks (always on)");
  verify->add_option("--input", input_path, "Also verify a user hypergraph");
  verify->add_option("--format", format, "Input format: auto, json, simplex")
      ->check(CLI::IsMember({"auto", "json", "simplex"}));
  verify->add_option("--cap", cap, "Brute-force enumeration cap (default 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (strict && seed == 0) {
      CLI::App* sub = app.get_subcommands().front();
      if (sub->count("--seed") == 0)
        throw UsageError("--strict requires an explicit --seed");
    }
    const int worker_threads = resolve_threads(threads);
    if (validate->parsed()) return run_validate(load_input(input_path, format), output_path);
    if (refine->parsed())
      return run_refine(load_input(input_path, format), L_text, worker_threads, output_path);
    if (find_symmetry->parsed())
      return run_find_symmetry(load_input(input_path, format), L_text, guard, worker_threads,
                               output_path);
    if (augment->parsed())
      return run_augment(load_input(input_path, format), mode, L_text, guard, p, q_text, seed,
                         n_samples, worker_threads, output_path);
    if (split->parsed())
      return run_split(load_input(input_path, format), train_pct, val_pct, target_size,
                       negative_ratio, seed, output_path);
    if (stats->parsed())
      return run_stats(stats_inputs, format, L_text, guard, worker_threads, output_path);
    if (verify->parsed()) {
      std::optional<std::string> user_input;
      if (verify->count("--input")) user_input = input_path;
      return run_verify(user_input, format, cap);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

int main(int argc, char** argv) { return run(argc, argv); }
