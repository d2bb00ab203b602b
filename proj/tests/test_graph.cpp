#include <gtest/gtest.h>

#include "oracle.hpp"
#include "vflow/graph.hpp"
#include "vflow/vfg_format.hpp"
#include "vflow/workload.hpp"

using namespace vflow;

namespace {

Vertex vx(std::string id, std::string var, StatementKind k, std::string fn,
          Condition occ = Condition::top()) {
  return Vertex{std::move(id), std::move(var), {std::move(k)}, std::move(fn), std::move(occ)};
}

GraphBuilder two_vertex_builder() {
  GraphBuilder b;
  b.declare_function("f", 0);
  b.add_vertex(vx("y", "y", StatementKind::assign(), "f"));
  b.add_vertex(vx("x", "x", StatementKind::assign(), "f"));
  return b;
}

}  // namespace

TEST(Graph, VerticesAreSortedById) {
  auto b = two_vertex_builder();
  b.add_edge("x", "y");
  auto g = b.build();
  ASSERT_EQ(g.vertex_count(), 2u);
  EXPECT_EQ(g.vertex(0).id, "x");
  EXPECT_EQ(g.vertex(1).id, "y");
  EXPECT_TRUE(g.edge_between(0, 1).has_value());
  EXPECT_FALSE(g.edge_between(1, 0).has_value());
}

TEST(Graph, RejectsCycles) {
  auto b = two_vertex_builder();
  b.add_edge("x", "y");
  b.add_edge("y", "x");
  EXPECT_THROW(b.build(), GraphError);
}

TEST(Graph, RejectsDuplicateIdsAndEdges) {
  auto b = two_vertex_builder();
  b.add_vertex(vx("x", "z", StatementKind::assign(), "f"));
  EXPECT_THROW(b.build(), GraphError);
  auto c = two_vertex_builder();
  c.add_edge("x", "y");
  c.add_edge("x", "y");
  EXPECT_THROW(c.build(), GraphError);
}

TEST(Graph, RejectsCrossFunctionIntraEdges) {
  GraphBuilder b;
  b.declare_function("f", 0);
  b.declare_function("g", 0);
  b.add_vertex(vx("x", "x", StatementKind::assign(), "f"));
  b.add_vertex(vx("y", "y", StatementKind::assign(), "g"));
  b.add_edge("x", "y");
  EXPECT_THROW(b.build(), GraphError);
}

TEST(Graph, RejectsRecursion) {
  const char* text = R"(
func f(1) {
  v p p param 0
  v a p call g arg 0
  e p -> a
}
func g(1) {
  v q q param 0
  v b q call f arg 0
  e q -> b
}
)";
  EXPECT_THROW(parse_program(text), GraphError);
}

TEST(Graph, RejectsForeignOccurrenceVariables) {
  GraphBuilder b;
  b.declare_function("f", 0);
  b.declare_function("g", 0);
  b.add_vertex(vx("x", "x", StatementKind::assign(), "f"));
  b.add_vertex(vx("y", "y", StatementKind::global(), "g", parse_atom_list("x > 0")));
  EXPECT_THROW(b.build(), GraphError);
}

TEST(Graph, LinksCallAndReturnEdges) {
  auto g = parse_program(oracle::slurp("interprocedural_example.vfg"));
  auto a = g.index_of("a");
  auto u = g.index_of("u");
  auto ret_u = g.index_of("ret_u");
  auto b = g.index_of("b");
  auto call = g.edge_between(a, u);
  auto ret = g.edge_between(ret_u, b);
  ASSERT_TRUE(call && ret);
  EXPECT_EQ(g.edge(*call).kind, EdgeKind::call_bind);
  EXPECT_EQ(g.edge(*ret).kind, EdgeKind::ret_bind);
  EXPECT_EQ(g.edge(*call).site, g.edge(*ret).site);
  EXPECT_EQ(g.call_graph().at("main"), (std::set<std::string>{"xfree", "xmalloc"}));
}

TEST(Graph, ConcatJoinsOnlyAdjacentPaths) {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  Path p1 = make_path(g, std::vector<std::string>{"p", "a"});
  Path p2 = make_path(g, std::vector<std::string>{"b", "free(b)"});
  Path p3 = make_path(g, std::vector<std::string>{"c", "*c=1"});
  Path joined = concat(g, p1, p2);
  EXPECT_EQ(vertex_ids(g, joined), (std::vector<std::string>{"p", "a", "b", "free(b)"}));
  EXPECT_EQ(joined.edges.size(), 3u);
  EXPECT_THROW(concat(g, p2, p3), ConcatError);
  EXPECT_THROW(make_path(g, std::vector<std::string>{"b", "c"}), ConcatError);
}

TEST(Graph, EnumerationRespectsCallSites) {
  const char* text = R"(
func id(1) {
  v x x param 0
  v r x ret
  e x -> r
}
func main(0) {
  v a a call id arg 0 site s1
  v ra a call id ret site s1
  v b b call id arg 0 site s2
  v rb b call id ret site s2
}
)";
  auto g = parse_program(text);
  auto a = g.index_of("a");
  auto rb = g.index_of("rb");
  EXPECT_TRUE(enumerate_paths(g, {a}, {rb}).empty());
  EXPECT_EQ(enumerate_paths(g, {a}, {rb}, ContextPolicy::any).size(), 1u);
  EXPECT_EQ(enumerate_paths(g, {a}, {g.index_of("ra")}).size(), 1u);
}

TEST(Graph, EnumerationMatchesOracleOnWorkloads) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    const auto& g = w.graph;
    std::vector<VertexIndex> all;
    std::set<std::string> ids;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      if (g.vertex(v).has_role(Stmt::global) || g.vertex(v).has_role(Stmt::call)) {
        all.push_back(v);
        ids.insert(g.vertex(v).id);
      }
    }
    auto mine = oracle::as_id_set(g, enumerate_paths(g, all, all));
    EXPECT_EQ(mine, oracle::realizable_paths(g, ids, ids)) << "seed " << seed;
  }
}

TEST(Graph, ClassifiesAppendixPaths) {
  auto g = parse_program(oracle::slurp("appendix_example.vfg"));
  auto cls = [&](std::vector<std::string> ids) { return classify_path(g, make_path(g, ids)); };
  EXPECT_EQ(cls({"a@s10", "u@s4", "u@s6", "b@s10"}), PathClass::same_level);
  EXPECT_EQ(cls({"p@s1", "p@s2"}), PathClass::output);
  EXPECT_EQ(cls({"u@s4", "u@s5"}), PathClass::input);
  EXPECT_EQ(cls({"b@s10", "b@s11"}), PathClass::intra_procedural);
  EXPECT_EQ(cls({"p@s1", "p@s2", "a@s9", "a@s10", "u@s4", "u@s5"}), PathClass::general);
  EXPECT_STREQ(to_string(PathClass::same_level), "SL");
}
