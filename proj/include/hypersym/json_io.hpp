#pragma once

// JSON (de)serialization for hypergraphs and a deterministic dumper: keys
// sorted (nlohmann objects already iterate in key order), floats printed with
// %.17g so every double round-trips and reruns diff byte-identically.

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypersym/core.hpp"
#include "hypersym/data.hpp"

namespace hypersym {

inline nlohmann::json hypergraph_to_json(const Hypergraph& h) {
  nlohmann::json j;
  j["n"] = h.n;
  j["edges"] = h.edges;
  return j;
}

inline nlohmann::json temporal_to_json(const TemporalHypergraph& th) {
  nlohmann::json j = hypergraph_to_json(th.hypergraph);
  j["timestamps"] = th.timestamps;
  return j;
}

struct JsonHypergraphResult {
  TemporalHypergraph temporal;
  bool had_timestamps = false;
  ParseStats stats;
};

// Reads {"n": int, "edges": [[int,...],...], "timestamps": [num,...]?}.
// Edges are canonicalized exactly like the simplex-list path; absent
// timestamps are synthesized as integers in input order so temporal
// operations stay defined.
inline JsonHypergraphResult hypergraph_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("hypergraph JSON must be an object");
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw std::invalid_argument("hypergraph JSON needs an integer field 'n'");
  if (!j.contains("edges") || !j["edges"].is_array())
    throw std::invalid_argument("hypergraph JSON needs an array field 'edges'");
  const int n = j["n"].get<int>();
  if (n < 0) throw std::invalid_argument("'n' must be >= 0");

  std::vector<std::vector<int>> edges;
  for (const nlohmann::json& e : j["edges"]) {
    if (!e.is_array()) throw std::invalid_argument("'edges' must hold arrays of vertex ids");
    std::vector<int> edge;
    for (const nlohmann::json& v : e) {
      if (!v.is_number_integer()) throw std::invalid_argument("vertex ids must be integers");
      edge.push_back(v.get<int>());
    }
    edges.push_back(std::move(edge));
  }

  JsonHypergraphResult result;
  std::vector<double> times;
  if (j.contains("timestamps")) {
    if (!j["timestamps"].is_array())
      throw std::invalid_argument("'timestamps' must be an array of numbers");
    for (const nlohmann::json& t : j["timestamps"]) {
      if (!t.is_number()) throw std::invalid_argument("'timestamps' must be an array of numbers");
      times.push_back(t.get<double>());
    }
    result.had_timestamps = true;
  } else {
    times.resize(edges.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);
  }
  result.temporal = make_temporal(n, edges, times, &result.stats);
  return result;
}

inline JsonHypergraphResult hypergraph_from_json_stream(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("malformed JSON: ") + err.what());
  }
  return hypergraph_from_json(j);
}

namespace detail {

inline void dump_deterministic_impl(const nlohmann::json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string inner(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + nlohmann::json(key).dump() + ": ";
        dump_deterministic_impl(value, out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_deterministic_impl(j[i], out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      char buffer[64];
      std::snprintf(buffer, sizeof buffer, "%.17g", j.get<double>());
      out += buffer;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline std::string dump_deterministic(const nlohmann::json& j) {
  std::string out;
  detail::dump_deterministic_impl(j, out, 0);
  out += "\n";
  return out;
}

}  // namespace hypersym
