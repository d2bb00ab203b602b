#pragma once

#include <map>
#include <string>
#include <vector>

#include "vflow/condition.hpp"
#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"
#include "vflow/solver.hpp"
#include "vflow/stats.hpp"

namespace vflow {

enum class Verdict { path_bug, pair_bug, leak_bug };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::path_bug: return "path-bug";
    case Verdict::pair_bug: return "pair-bug";
    case Verdict::leak_bug: return "leak-bug";
  }
  return "?";
}

struct BugReport {
  std::string property;
  Verdict verdict = Verdict::path_bug;
  std::vector<Path> witness;
  VertexIndex source = 0;
  Condition condition_checked = Condition::top();

  friend bool operator==(const BugReport& a, const BugReport& b) {
    return a.property == b.property && a.verdict == b.verdict && a.witness == b.witness &&
           a.source == b.source && a.condition_checked == b.condition_checked;
  }
};

using PathsBySource = std::map<VertexIndex, std::vector<FeasiblePath>>;

inline PathsBySource group_by_source(const std::vector<FeasiblePath>& paths) {
  PathsBySource out;
  for (const auto& p : paths) out[p.source].push_back(p);
  return out;
}

inline std::vector<BugReport> agg_never(const std::vector<FeasiblePath>& paths, const Condition& psc_template = Condition::top(),
                                        const ValueFlowGraph* g = nullptr) {
  std::vector<BugReport> out;
  for (const auto& p : paths) {
    Condition psc = psc_template;
    if (g && !psc.is_true()) psc = psc.substitute(kPscSymbol, g->vertex(p.source).variable);
    out.push_back({p.property, Verdict::path_bug, {p.path}, p.source, p.pc && psc});
  }
  return out;
}

/// A pair of distinct paths from one source is a bug when both can hold at
/// once under the psc.
inline std::vector<BugReport> agg_never_sim(const ValueFlowGraph& g, const PropertySpec& spec,
                                            const PathsBySource& by_source, Solver& solver) {
  std::vector<BugReport> out;
  for (const auto& [src, paths] : by_source) {
    Condition psc = instantiate_psc(spec, g.vertex(src));
    for (std::size_t i = 0; i < paths.size(); ++i) {
      for (std::size_t j = i + 1; j < paths.size(); ++j) {
        Condition c = paths[i].pc && paths[j].pc && psc;
        if (solver.is_sat(c) == SatResult::sat) {
          out.push_back({spec.name, Verdict::pair_bug, {paths[i].path, paths[j].path}, src, c});
        }
      }
    }
  }
  return out;
}

/// A source is a bug when it can occur, satisfy the psc, and take none of
/// its paths. `sources` lists every source, including those without paths.
inline std::vector<BugReport> agg_must(const ValueFlowGraph& g, const PropertySpec& spec,
                                       const PathsBySource& by_source,
                                       const std::vector<VertexIndex>& sources, Solver& solver) {
  std::vector<BugReport> out;
  for (VertexIndex src : sources) {
    std::vector<Condition> pcs;
    std::vector<Path> witness;
    auto it = by_source.find(src);
    if (it != by_source.end()) {
      for (const auto& p : it->second) {
        pcs.push_back(p.pc);
        witness.push_back(p.path);
      }
    }
    const Vertex& v = g.vertex(src);
    Condition c = Condition::negation(Condition::disj(pcs)) && v.occurrence && instantiate_psc(spec, v);
    if (solver.is_sat(c) == SatResult::sat) {
      out.push_back({spec.name, Verdict::leak_bug, std::move(witness), src, c});
    }
  }
  return out;
}

/// Reports of every property, indexed by bit.
inline std::vector<std::vector<BugReport>> aggregate(const ValueFlowGraph& g,
                                                     const std::vector<PropertySpec>& specs,
                                                     const AnalysisResult& result, Solver& solver) {
  MatchTable table(g, specs);
  std::vector<std::vector<BugReport>> out(specs.size());
  for (const auto& s : specs) {
    const auto& paths = result.paths.at(s.bit);
    switch (s.agg) {
      case Aggregate::never: out[s.bit] = agg_never(paths, s.psc, &g); break;
      case Aggregate::never_sim: out[s.bit] = agg_never_sim(g, s, group_by_source(paths), solver); break;
      case Aggregate::must:
        out[s.bit] = agg_must(g, s, group_by_source(paths), table.sources(s.bit), solver);
        break;
    }
  }
  return out;
}

}  // namespace vflow
