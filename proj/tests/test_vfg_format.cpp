#include <gtest/gtest.h>

#include "oracle.hpp"
#include "vflow/vfg_format.hpp"
#include "vflow/workload.hpp"

using namespace vflow;

TEST(VfgFormat, FixturesRoundTrip) {
  for (const char* name : {"running_example.vfg", "interprocedural_example.vfg", "appendix_example.vfg"}) {
    auto g = parse_program(oracle::slurp(name));
    auto text = print_program(g);
    auto again = parse_program(text);
    EXPECT_EQ(again, g) << name;
    EXPECT_EQ(print_program(again), text) << name;
  }
}

TEST(VfgFormat, GeneratedProgramsRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto g = gen_workload(seed, oracle::corpus_params(seed)).graph;
    EXPECT_EQ(parse_program(print_program(g)), g) << "seed " << seed;
  }
}

TEST(VfgFormat, ReadsRunningExample) {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  EXPECT_EQ(g.vertex_count(), 9u);
  EXPECT_EQ(g.edges().size(), 8u);
  const Vertex& p = g.vertex(g.index_of("p"));
  EXPECT_EQ(p.occurrence.to_string(), "x1 > 0");
  EXPECT_TRUE(p.has_role(Stmt::call));
  const Vertex& fb = g.vertex(g.index_of("free(b)"));
  EXPECT_EQ(fb.roles.front().site, "free_b");
  EXPECT_EQ(fb.roles.front().index, 0);
  auto e = g.edge_between(g.index_of("a"), g.index_of("c"));
  ASSERT_TRUE(e);
  EXPECT_EQ(g.edge(*e).guard.to_string(), "a != 0");
}

TEST(VfgFormat, AlsoAddsRoles) {
  auto g = parse_program(oracle::slurp("interprocedural_example.vfg"));
  const Vertex& a = g.vertex(g.index_of("a"));
  ASSERT_EQ(a.roles.size(), 2u);
  EXPECT_TRUE(a.roles[0].is_call_ret());
  EXPECT_TRUE(a.roles[1].is_call_arg());
}

TEST(VfgFormat, BareLoadAndStoreUseDefaultSlots) {
  auto g = parse_program("func f(0) {\n  v l x load\n  v s y store\n}\n");
  EXPECT_EQ(g.vertex(g.index_of("l")).roles.front().slot, Slot::operand);
  EXPECT_EQ(g.vertex(g.index_of("s")).roles.front().slot, Slot::address);
}

TEST(VfgFormat, LoopsUnrollTwice) {
  const char* text = R"(
func f(0) {
  v in x assign
  loop {
    v h x assign
    v t x assign
    e h -> t guard x > 0
    e t -> h
  }
  v out x load operand
  e in -> h
  e t -> out
}
)";
  auto g = parse_program(text);
  for (const char* id : {"h#1", "h#2", "t#1", "t#2"}) EXPECT_TRUE(g.find(id).has_value()) << id;
  EXPECT_FALSE(g.find("h").has_value());
  auto has = [&](const char* a, const char* b) { return g.edge_between(g.index_of(a), g.index_of(b)).has_value(); };
  EXPECT_TRUE(has("in", "h#1"));
  EXPECT_FALSE(has("in", "h#2"));
  EXPECT_TRUE(has("h#1", "t#1"));
  EXPECT_TRUE(has("h#2", "t#2"));
  EXPECT_TRUE(has("t#1", "h#2"));
  EXPECT_FALSE(has("t#2", "h#1"));
  EXPECT_TRUE(has("t#1", "out"));
  EXPECT_TRUE(has("t#2", "out"));
  EXPECT_EQ(g.edges().size(), 6u);
}

TEST(VfgFormat, ParseErrorsReportLineAndColumn) {
  try {
    parse_program("func f(0) {\n  v a a assign\n  e a -> nowhere\n}\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 5u);
  }
  try {
    parse_program("func f(0) {\n  v a a assign cond x >> 1\n}\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 20u);
  }
  EXPECT_THROW(parse_program("func f(0) {\n  loop {\n    loop {\n    }\n  }\n}\n"), ParseError);
  EXPECT_THROW(parse_program("func f(0) {\n  v a a teleport\n}\n"), ParseError);
  EXPECT_THROW(parse_program("func f(0) {\n"), ParseError);
}
