#include <gtest/gtest.h>

#include "oracle.hpp"
#include "vflow/engine_naive.hpp"
#include "vflow/summaries.hpp"
#include "vflow/vfg_format.hpp"
#include "vflow/workload.hpp"

using namespace vflow;

namespace {

// Visits of the per-property search: every realizable prefix from a
// source whose proper prefix passed its check.
std::uint64_t expected_visits(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs, Solver& s) {
  std::set<std::string> all;
  for (const auto& v : g.vertices()) all.insert(v.id);
  std::uint64_t n = 0;
  for (const auto& spec : specs) {
    auto [src, snk] = oracle::endpoints(g, spec);
    for (const auto& p : oracle::realizable_paths(g, src, all)) {
      if (p.size() == 1) {
        ++n;
        continue;
      }
      oracle::IdPath parent(p.begin(), p.end() - 1);
      auto psc = spec.psc.substitute("v", g.vertex(g.index_of(p.front())).variable);
      if (s.check(oracle::guards_of(g, parent) && psc)) ++n;
    }
  }
  return n;
}

}  // namespace

TEST(NaiveEngine, RunningExampleCounts) {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  auto specs = parse_specs(oracle::slurp("demo.prop"));
  auto r = check_naive(g, specs);
  EXPECT_EQ(r.stats.vertices_visited, 16u);
  EXPECT_EQ(r.stats.solver.sat_queries, 16u);
  EXPECT_EQ(r.stats.pruned_psc, 0u);
  EXPECT_EQ(r.stats.pruned_rule2, 0u);
  ASSERT_EQ(r.paths.size(), 2u);
  EXPECT_EQ(r.paths[0].size(), 1u);
  EXPECT_EQ(r.paths[1].size(), 2u);
  EXPECT_EQ(vertex_ids(g, r.paths[0][0].path), (std::vector<std::string>{"p", "a", "c", "*c=1"}));
}

TEST(NaiveEngine, PrunesInfeasiblePrefixes) {
  const char* text = R"(
func f(0) {
  v s s global
  v a a assign
  v k k load operand
  e s -> a guard s > 5
  e a -> k guard s < 2
}
)";
  auto g = parse_program(text);
  auto specs = parse_specs("prop x { src: global; sink: load operand; psc: true; agg: never }");
  auto r = check_naive(g, specs);
  EXPECT_TRUE(r.paths[0].empty());
  EXPECT_EQ(r.stats.vertices_visited, 3u);
  EXPECT_EQ(r.stats.pruned_psc, 1u);
}

TEST(NaiveEngine, VisitCountsMatchOracle) {
  Solver s;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    auto r = check_naive(w.graph, w.specs);
    EXPECT_EQ(r.stats.vertices_visited, expected_visits(w.graph, w.specs, s)) << "seed " << seed;
    EXPECT_EQ(r.stats.solver.sat_queries, r.stats.vertices_visited);
  }
}

TEST(NaiveEngine, PathsMatchTruthTableOracle) {
  // Small domain so that the oracle can enumerate assignments.
  EngineOptions opt;
  opt.domain = Domain::symmetric(3);
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 150 && compared < 60; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    auto r = check_naive(w.graph, w.specs, opt);
    std::size_t vars = 0;
    for (const auto& e : w.graph.edges()) vars += e.guard.variables().size();
    if (vars > 12) continue;
    ++compared;
    for (const auto& spec : w.specs) {
      EXPECT_EQ(oracle::as_id_set(w.graph, r.paths[spec.bit]), oracle::feasible_paths(w.graph, spec, -3, 2))
          << "seed " << seed << " property " << spec.name;
    }
  }
  EXPECT_GE(compared, 30);
}

TEST(NaiveEngine, ThreadsDoNotChangeResults) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    EngineOptions one, many;
    many.threads = 4;
    auto a = check_naive(w.graph, w.specs, one);
    auto b = check_naive(w.graph, w.specs, many);
    EXPECT_EQ(a.paths, b.paths);
    EXPECT_EQ(a.stats, b.stats);
  }
}

TEST(NaiveEngine, BudgetErrorNamesThePath) {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  auto specs = parse_specs(oracle::slurp("demo.prop"));
  EngineOptions opt;
  opt.solver_budget = 1;
  try {
    check_naive(g, specs, opt);
    FAIL() << "expected the budget to run out";
  } catch (const SolverBudgetExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("path"), std::string::npos);
  }
}

TEST(NaiveEngine, SummaryModeFindsTheSamePaths) {
  auto g = parse_program(oracle::slurp("interprocedural_example.vfg"));
  auto specs = parse_specs(oracle::slurp("interprocedural.prop"));
  auto cands = stitch_candidates(g, build_all_summaries(g, specs, 1), specs);
  EXPECT_EQ(check_naive(g, specs, cands).paths, check_naive(g, specs).paths);
}
