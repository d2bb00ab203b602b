#pragma once

// End-to-end runs: load inputs, pick an engine, aggregate, render.

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vflow/aggregate.hpp"
#include "vflow/engine_catapult.hpp"
#include "vflow/engine_naive.hpp"
#include "vflow/error.hpp"
#include "vflow/propspec.hpp"
#include "vflow/report.hpp"
#include "vflow/summaries.hpp"
#include "vflow/vfg_format.hpp"
#include "vflow/workload.hpp"

namespace vflow {

enum class EngineKind { naive, catapult };
enum class ModeKind { intra, summary };
enum class OutputKind { text, json };

struct RunConfig {
  EngineKind engine = EngineKind::catapult;
  ModeKind mode = ModeKind::intra;
  RuleMask rule_mask{};
  std::optional<std::vector<std::string>> forced_order;
  int domain_bound = 64;
  std::optional<std::uint64_t> seed;
  OutputKind output = OutputKind::text;
  int threads = 1;
  std::uint64_t skeleton_budget = 1'000'000;
  bool verify_stores = false;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parse_error = 1;
inline constexpr int budget_exceeded = 2;
inline constexpr int invariant_violation = 3;
}  // namespace exit_code

/// Accepts decimal, 0b… and 0x… forms in [0, 255].
inline RuleMask parse_rule_mask(const std::string& text) {
  int base = 10;
  std::string digits = text;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'b' || text[1] == 'B')) {
    base = 2;
    digits = text.substr(2);
  } else if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    digits = text.substr(2);
  }
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(digits, &used, base);
  } catch (const std::exception&) {
    used = 0;
  }
  if (digits.empty() || used != digits.size() || v > 0xFF) {
    throw std::invalid_argument("rule mask must be an integer in [0, 255]: " + text);
  }
  return RuleMask{static_cast<std::uint8_t>(v)};
}

inline GenParams parse_gen_params(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  GenParams p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "functions") p.functions = it->get<int>();
    else if (k == "min_vertices") p.min_vertices = it->get<int>();
    else if (k == "max_vertices") p.max_vertices = it->get<int>();
    else if (k == "edge_density") p.edge_density = it->get<double>();
    else if (k == "guard_probability") p.guard_probability = it->get<double>();
    else if (k == "properties") p.properties = it->get<int>();
    else if (k == "sink_density") p.sink_density = it->get<double>();
    else throw std::invalid_argument("unknown generator parameter: " + k);
  }
  p.validate();
  return p;
}

/// Runs the configured engine and aggregation on a loaded program.
inline RunReport analyze(const RunConfig& cfg, const ValueFlowGraph& g, const std::vector<PropertySpec>& specs) {
  RunReport r;
  r.engine = cfg.engine == EngineKind::naive ? "naive" : "catapult";
  r.mode = cfg.mode == ModeKind::intra ? "intra" : "summary";
  r.rules = cfg.rule_mask;

  CatapultOptions opt;
  opt.domain = Domain::symmetric(cfg.domain_bound);
  opt.threads = cfg.threads;
  opt.rules = cfg.rule_mask;
  opt.forced_order = cfg.forced_order;
  opt.skeleton_budget = cfg.skeleton_budget;

  std::vector<Candidate> candidates;
  if (cfg.mode == ModeKind::summary) {
    candidates = stitch_candidates(g, build_all_summaries(g, specs, cfg.threads), specs);
  }

  if (cfg.engine == EngineKind::naive) {
    r.result = cfg.mode == ModeKind::intra ? check_naive(g, specs, opt) : check_naive(g, specs, candidates, opt);
  } else {
    MatchTable table(g, specs);
    auto go = [&](auto& walker) {
      CatapultEngine engine(g, specs, walker, opt);
      r.result = engine.run();
      r.plan = engine.plan();
      if (cfg.verify_stores) engine.verify_stores();
    };
    if (cfg.mode == ModeKind::intra) {
      GraphWalker walker(g, table);
      go(walker);
    } else {
      CandidateTrie trie(candidates);
      go(trie);
    }
  }

  Solver agg_solver(opt.domain, opt.solver_budget);
  r.bugs = aggregate(g, specs, r.result, agg_solver);
  r.aggregation_queries = agg_solver.counters().sat_queries;
  return r;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Full run with error-to-exit-code mapping. Either both paths are given,
/// or `cfg.seed` selects a generated workload.
inline int run(const RunConfig& cfg, const std::string& program_path, const std::string& spec_path,
               std::ostream& out, std::ostream& err, const GenParams& gen = {}) {
  try {
    ValueFlowGraph g;
    std::vector<PropertySpec> specs;
    if (cfg.seed) {
      auto w = gen_workload(*cfg.seed, gen);
      g = std::move(w.graph);
      specs = std::move(w.specs);
    } else {
      g = parse_program(read_file(program_path));
      specs = parse_specs(read_file(spec_path));
    }
    if (specs.empty()) throw std::invalid_argument("no properties to check");
    RunReport r = analyze(cfg, g, specs);
    if (cfg.output == OutputKind::json) {
      out << report_json(g, specs, r).dump(2) << "\n";
    } else {
      out << report_text(g, specs, r);
    }
    return exit_code::ok;
  } catch (const SolverBudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::budget_exceeded;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::invariant_violation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::parse_error;
  }
}

}  // namespace vflow
