#pragma once

// Human-readable and JSON renderings of an analysis run.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vflow/aggregate.hpp"
#include "vflow/engine_catapult.hpp"
#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"
#include "vflow/stats.hpp"

namespace vflow {

struct RunReport {
  std::string engine;  // naive | catapult
  std::string mode;    // intra | summary
  RuleMask rules{};
  std::optional<Plan> plan;  // catapult only
  AnalysisResult result;
  std::vector<std::vector<BugReport>> bugs;  // by bit
  std::uint64_t aggregation_queries = 0;
};

inline std::string rule_mask_string(RuleMask m) {
  std::string s = "0b";
  for (int r = 8; r >= 1; --r) s += m.on(r) ? '1' : '0';
  return s;
}

inline nlohmann::ordered_json stats_json(const AnalysisStats& s) {
  nlohmann::ordered_json j;
  j["vertices_visited"] = s.vertices_visited;
  j["sat_queries"] = s.solver.sat_queries;
  j["core_extractions"] = s.solver.core_extractions;
  j["interpolations"] = s.solver.interpolations;
  j["pruned_psc"] = s.pruned_psc;
  j["pruned_rule2"] = s.pruned_rule2;
  j["pruned_rule34"] = s.pruned_rule34;
  j["psc_checks_saved"] = s.psc_checks_saved;
  j["skeleton_steps"] = s.skeleton_steps;
  j["psc_relation_queries"] = s.psc_relation_queries;
  return j;
}

/// Schema: {plan, properties: [{name, agg, bugs: [...]}], stats}. Keys
/// always appear, in this order.
inline nlohmann::ordered_json report_json(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                                          const RunReport& r) {
  using J = nlohmann::ordered_json;
  J plan;
  plan["engine"] = r.engine;
  plan["mode"] = r.mode;
  plan["rule_mask"] = rule_mask_string(r.rules);
  J groups = J::array();
  J directives = J::array();
  if (r.plan) {
    for (const auto& grp : r.plan->groups) {
      J jg;
      J members = J::array();
      for (int b : grp.members) members.push_back(specs[b].name);
      jg["members"] = members;
      jg["sources"] = grp.sources.size();
      jg["sink_count"] = grp.sink_count;
      J rels = J::array();
      for (const auto& rel : grp.relations) {
        J jr;
        jr["a"] = specs[rel.a].name;
        jr["b"] = specs[rel.b].name;
        jr["a_to_b"] = to_string(rel.a_to_b);
        jr["b_to_a"] = to_string(rel.b_to_a);
        jr["strategy"] = rel.strategy(r.rules);
        rels.push_back(jr);
      }
      jg["relations"] = rels;
      groups.push_back(jg);
    }
    for (const auto& d : r.plan->directives) {
      directives.push_back(J{{"kind", d.kind}, {"from", d.from}, {"to", d.to}});
    }
  } else {
    MatchTable table(g, specs);
    for (const auto& s : specs) {
      groups.push_back(J{{"members", J::array({s.name})},
                         {"sources", table.sources(s.bit).size()},
                         {"sink_count", table.sinks(s.bit).size()},
                         {"relations", J::array()}});
    }
  }
  plan["groups"] = groups;
  plan["directives"] = directives;

  J props = J::array();
  for (const auto& s : specs) {
    J bugs = J::array();
    for (const auto& b : r.bugs[s.bit]) {
      J witness = J::array();
      for (const auto& p : b.witness) witness.push_back(vertex_ids(g, p));
      bugs.push_back(J{{"verdict", to_string(b.verdict)},
                       {"source", g.vertex(b.source).id},
                       {"witness", witness},
                       {"condition", b.condition_checked.to_string()}});
    }
    props.push_back(J{{"name", s.name},
                      {"agg", to_string(s.agg)},
                      {"feasible_paths", r.result.paths[s.bit].size()},
                      {"bugs", bugs}});
  }

  J stats = stats_json(r.result.stats);
  stats["aggregation_queries"] = r.aggregation_queries;

  J out;
  out["plan"] = plan;
  out["properties"] = props;
  out["stats"] = stats;
  return out;
}

inline std::string report_text(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                               const RunReport& r) {
  std::ostringstream os;
  os << "engine " << r.engine << " (" << r.mode << ")";
  if (r.engine == "catapult") os << ", rules " << rule_mask_string(r.rules);
  os << "\n";
  if (r.plan) {
    os << "plan:\n";
    int k = 1;
    for (const auto& grp : r.plan->groups) {
      os << "  " << k++ << ".";
      for (int b : grp.members) os << " " << specs[b].name;
      os << "  (" << grp.sources.size() << " sources, " << grp.sink_count << " sinks)\n";
      for (const auto& rel : grp.relations) {
        os << "     " << specs[rel.a].name << " / " << specs[rel.b].name << ": "
           << rel.strategy(r.rules) << "\n";
      }
    }
  }
  for (const auto& s : specs) {
    const auto& bugs = r.bugs[s.bit];
    os << s.name << " [" << to_string(s.agg) << "]: " << bugs.size() << (bugs.size() == 1 ? " bug" : " bugs")
       << "\n";
    for (const auto& b : bugs) {
      os << "  " << to_string(b.verdict) << " from " << g.vertex(b.source).id << "\n";
      for (const auto& p : b.witness) os << "    " << to_string(g, p) << "\n";
    }
  }
  const auto& st = r.result.stats;
  os << "stats:\n"
     << "  vertices_visited     " << st.vertices_visited << "\n"
     << "  sat_queries          " << st.solver.sat_queries << "\n"
     << "  core_extractions     " << st.solver.core_extractions << "\n"
     << "  interpolations       " << st.solver.interpolations << "\n"
     << "  pruned_psc           " << st.pruned_psc << "\n"
     << "  pruned_rule2         " << st.pruned_rule2 << "\n"
     << "  pruned_rule34        " << st.pruned_rule34 << "\n"
     << "  psc_checks_saved     " << st.psc_checks_saved << "\n"
     << "  skeleton_steps       " << st.skeleton_steps << "\n"
     << "  psc_relation_queries " << st.psc_relation_queries << "\n"
     << "  aggregation_queries  " << r.aggregation_queries << "\n";
  return os.str();
}

}  // namespace vflow
