#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glkit/errors.hpp"
#include "glkit/glpg.hpp"
#include "glkit/instance.hpp"
#include "glkit/structures.hpp"

namespace glkit {

struct InstanceFile {
  DecisionSet set;
  std::optional<std::vector<long>> theta;       // integer form
  std::optional<std::vector<double>> theta_real;
  std::optional<double> epsilon;                // discretization step
  std::string instance_id;

  explicit InstanceFile(DecisionSet s) : set(std::move(s)) {}
};

namespace detail {

inline std::vector<std::pair<int, int>> parse_edges(const nlohmann::json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw InvalidInstance("instance: each edge must be a pair");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return edges;
}

inline DecisionSet parse_structure(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidInstance("instance: structure.kind missing");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "mset")
    return DecisionSet{MSet{j.at("d").get<int>(), j.at("m").get<int>()}};
  if (kind == "path_dag")
    return DecisionSet{StPathDag{j.at("nodes").get<int>(),
                                 parse_edges(j.at("edges")),
                                 j.at("source").get<int>(),
                                 j.at("sink").get<int>()}};
  if (kind == "bipartite_matching")
    return DecisionSet{BipartiteMatching{j.at("left").get<int>(),
                                         j.at("right").get<int>(),
                                         parse_edges(j.at("edges")),
                                         j.value("perfect", false)}};
  if (kind == "explicit") {
    Explicit ex;
    for (const auto& row : j.at("decisions"))
      ex.decisions.push_back(row.get<Decision>());
    return DecisionSet{std::move(ex)};
  }
  throw InvalidInstance("instance: unknown structure kind '" + kind + "'");
}

}  // namespace detail

inline InstanceFile parse_instance(const nlohmann::json& j,
                                   const std::string& fallback_id) {
  if (!j.is_object() || !j.contains("structure"))
    throw InvalidInstance("instance: top-level 'structure' missing");
  InstanceFile f(detail::parse_structure(j.at("structure")));
  int d = f.set.dimension();
  if (j.contains("theta")) {
    f.theta = j.at("theta").get<std::vector<long>>();
    if (static_cast<int>(f.theta->size()) != d)
      throw InvalidInstance("instance: theta length does not match d");
    for (long v : *f.theta)
      if (v < 1) throw InvalidInstance("instance: integer theta entries must be >= 1");
  } else if (j.contains("theta_real")) {
    f.theta_real = j.at("theta_real").get<std::vector<double>>();
    if (static_cast<int>(f.theta_real->size()) != d)
      throw InvalidInstance("instance: theta_real length does not match d");
    if (!j.contains("epsilon"))
      throw InvalidInstance("instance: theta_real requires epsilon");
    f.epsilon = j.at("epsilon").get<double>();
    if (!(*f.epsilon > 0.0))
      throw InvalidInstance("instance: epsilon must be positive");
  } else {
    throw InvalidInstance("instance: need theta or theta_real");
  }
  f.instance_id = j.value("instance_id", fallback_id);
  return f;
}

inline InstanceFile load_instance(const std::string& path,
                                  const std::string& fallback_id) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open instance file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("instance JSON parse error: ") + e.what());
  }
  return parse_instance(j, fallback_id);
}

// ---------------------------------------------------------------------------
// Solution files

inline nlohmann::json solution_to_json(const GLOutput& out) {
  nlohmann::json j;
  j["atoms"] = out.atoms;
  j["weights"] = out.weights;
  j["objective"] = out.objective;
  j["certified_max_violation"] = out.certified_max_violation;
  j["iterations"] = out.iterations;
  return j;
}

struct SolutionFile {
  std::vector<Decision> atoms;
  std::vector<double> weights;
  double objective = 0.0;
  double certified_max_violation = 0.0;
  long iterations = 0;
};

inline SolutionFile load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open solution file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("solution JSON parse error: ") + e.what());
  }
  SolutionFile s;
  try {
    s.atoms = j.at("atoms").get<std::vector<Decision>>();
    s.weights = j.at("weights").get<std::vector<double>>();
    s.objective = j.at("objective").get<double>();
    s.certified_max_violation = j.at("certified_max_violation").get<double>();
    s.iterations = j.at("iterations").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("solution JSON schema error: ") + e.what());
  }
  return s;
}

}  // namespace glkit
