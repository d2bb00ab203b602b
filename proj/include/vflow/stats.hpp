#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "vflow/condition.hpp"
#include "vflow/graph.hpp"
#include "vflow/solver.hpp"

namespace vflow {

/// Conjunction of the guards along `p`, in path order.
inline Condition path_condition(const ValueFlowGraph& g, const Path& p) {
  std::vector<Condition> guards;
  guards.reserve(p.edges.size());
  for (EdgeIndex e : p.edges) guards.push_back(g.edge(e).guard);
  return Condition::conj(guards);
}

struct FeasiblePath {
  std::string property;
  int bit = 0;
  Path path;
  Condition pc = Condition::top();
  VertexIndex source = 0;
  VertexIndex sink = 0;

  friend bool operator==(const FeasiblePath& a, const FeasiblePath& b) {
    return a.bit == b.bit && a.path == b.path;
  }
  friend bool operator<(const FeasiblePath& a, const FeasiblePath& b) {
    return a.bit != b.bit ? a.bit < b.bit : a.path < b.path;
  }
};

struct AnalysisStats {
  std::uint64_t vertices_visited = 0;
  SolverCounters solver;
  std::uint64_t pruned_psc = 0;
  std::uint64_t pruned_rule2 = 0;
  std::uint64_t pruned_rule34 = 0;
  std::uint64_t psc_checks_saved = 0;
  std::uint64_t skeleton_steps = 0;
  std::uint64_t psc_relation_queries = 0;

  AnalysisStats& operator+=(const AnalysisStats& o) {
    vertices_visited += o.vertices_visited;
    solver += o.solver;
    pruned_psc += o.pruned_psc;
    pruned_rule2 += o.pruned_rule2;
    pruned_rule34 += o.pruned_rule34;
    psc_checks_saved += o.psc_checks_saved;
    skeleton_steps += o.skeleton_steps;
    psc_relation_queries += o.psc_relation_queries;
    return *this;
  }
  friend bool operator==(const AnalysisStats&, const AnalysisStats&) = default;
};

/// Engine output: feasible paths indexed by property bit, each list sorted
/// by vertex sequence.
struct AnalysisResult {
  std::vector<std::vector<FeasiblePath>> paths;
  AnalysisStats stats;

  void sort_paths() {
    for (auto& list : paths) std::sort(list.begin(), list.end());
  }
};

}  // namespace vflow
