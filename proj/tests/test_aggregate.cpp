#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "vflow/aggregate.hpp"
#include "vflow/engine_naive.hpp"
#include "vflow/vfg_format.hpp"

using namespace vflow;

namespace {

// The running example with its four guards replaced.
std::string running_with(const std::string& g1, const std::string& g2, const std::string& g3,
                         const std::string& g4) {
  return "extern malloc(1)\nextern free(1)\nfunc main(0) {\n"
         "  v empty_str empty_str global\n"
         "  v p p call malloc ret cond " + g1 + "\n"
         "  v a a assign\n  v b b assign\n  v c c assign\n  v d d assign\n"
         "  v *c=1 c store address\n"
         "  v free(b) b call free arg 0 site free_b\n"
         "  v free(d) d call free arg 0 site free_d\n"
         "  e p -> a guard " + g1 + "\n"
         "  e empty_str -> a\n"
         "  e a -> b guard " + g2 + "\n"
         "  e a -> c guard " + g3 + "\n"
         "  e a -> d guard " + g4 + "\n"
         "  e b -> free(b)\n  e d -> free(d)\n  e c -> *c=1\n}\n";
}

bool truth(const Condition& c) { return oracle::truth_table_sat(c, -4, 3); }

}  // namespace

TEST(Aggregate, NeverReportsEachPath) {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  auto specs = parse_specs(oracle::slurp("demo.prop"));
  auto r = check_naive(g, specs);
  auto bugs = agg_never(r.paths[1], specs[1].psc, &g);
  ASSERT_EQ(bugs.size(), 2u);
  for (const auto& b : bugs) {
    EXPECT_EQ(b.verdict, Verdict::path_bug);
    EXPECT_EQ(b.witness.size(), 1u);
  }
  EXPECT_EQ(agg_never(r.paths[0], specs[0].psc, &g)[0].condition_checked.to_string(),
            "x1 > 0 && a != 0 && p == 0");
}

TEST(Aggregate, RunningExampleVerdicts) {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  auto specs = parse_specs(oracle::slurp("full.prop"));
  auto r = check_naive(g, specs);
  Solver s;
  auto bugs = aggregate(g, specs, r, s);
  ASSERT_EQ(bugs[2].size(), 1u);
  EXPECT_EQ(bugs[2][0].verdict, Verdict::pair_bug);
  EXPECT_EQ(bugs[2][0].witness.size(), 2u);
  ASSERT_EQ(bugs[3].size(), 1u);
  EXPECT_EQ(bugs[3][0].verdict, Verdict::leak_bug);
  EXPECT_EQ(g.vertex(bugs[3][0].source).id, "p");
  EXPECT_EQ(s.counters().sat_queries, 2u);
}

TEST(Aggregate, VerdictsMatchTruthTables) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> ops{"<", "<=", "==", "!=", ">=", ">"};
  auto atom = [&](const std::string& x) {
    return x + " " + ops[rng() % ops.size()] + " " + std::to_string(static_cast<int>(rng() % 7) - 3);
  };
  auto specs = parse_specs(oracle::slurp("full.prop"));
  EngineOptions opt;
  opt.domain = Domain::symmetric(4);
  int sim_bugs = 0, leaks = 0;
  for (int i = 0; i < 300; ++i) {
    std::string g1 = atom("x1"), g2 = atom(rng() % 2 ? "x2" : "x1"), g3 = atom("a"), g4 = atom(rng() % 2 ? "x4" : "x2");
    auto g = parse_program(running_with(g1, g2, g3, g4));
    auto r = check_naive(g, specs, opt);
    Solver s(opt.domain);
    auto bugs = aggregate(g, specs, r, s);
    Condition c1 = parse_atom_list(g1), c2 = parse_atom_list(g2), c4 = parse_atom_list(g4);
    Condition p_nonzero = parse_atom_list("p != 0");
    bool sim = truth((c1 && c2) && (c1 && c4) && p_nonzero);
    bool leak = truth(!((c1 && c2) || (c1 && c4)) && c1 && p_nonzero);
    // The pair exists only when both single paths are feasible on their own.
    bool both = truth(c1 && c2 && p_nonzero) && truth(c1 && c4 && p_nonzero);
    EXPECT_EQ(!bugs[2].empty(), sim && both) << g1 << " | " << g2 << " | " << g4;
    EXPECT_EQ(!bugs[3].empty(), leak) << g1 << " | " << g2 << " | " << g4;
    sim_bugs += !bugs[2].empty();
    leaks += !bugs[3].empty();
  }
  EXPECT_GT(sim_bugs, 10);
  EXPECT_GT(leaks, 10);
}

TEST(Aggregate, MustCoversSourcesWithoutPaths) {
  const char* text = R"(
extern malloc(1)
func f(0) {
  v p p call malloc ret cond k > 0
}
)";
  auto g = parse_program(text);
  auto specs = parse_specs("prop leak { src: call malloc ret; sink: load operand; psc: v != 0; agg: must }");
  auto r = check_naive(g, specs);
  EXPECT_TRUE(r.paths[0].empty());
  Solver s;
  auto bugs = aggregate(g, specs, r, s);
  ASSERT_EQ(bugs[0].size(), 1u);
  EXPECT_TRUE(bugs[0][0].witness.empty());
  EXPECT_EQ(bugs[0][0].condition_checked.to_string(), "k > 0 && p != 0");
}

TEST(Aggregate, NeverSimNeedsTwoPaths) {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  auto specs = parse_specs("prop df { src: call malloc ret; sink: call free arg 0; psc: v != 0; agg: never-sim }");
  std::vector<FeasiblePath> one{FeasiblePath{"df", 0, make_path(g, std::vector<std::string>{"p", "a", "b", "free(b)"}),
                                             parse_atom_list("x1 > 0; x2 > 0"), g.index_of("p"),
                                             g.index_of("free(b)")}};
  Solver s;
  EXPECT_TRUE(agg_never_sim(g, specs[0], group_by_source(one), s).empty());
  EXPECT_EQ(s.counters().sat_queries, 0u);
}
