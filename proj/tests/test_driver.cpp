#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracle.hpp"

using namespace vflow;

namespace {

std::string data(const std::string& name) { return std::string(VFLOW_DATA_DIR) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_on(RunConfig cfg, const std::string& prog, const std::string& spec) {
  std::ostringstream out, err;
  int code = run(cfg, prog.empty() ? "" : data(prog), spec.empty() ? "" : data(spec), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> keys(const nlohmann::ordered_json& j) {
  std::vector<std::string> ks;
  for (auto it = j.begin(); it != j.end(); ++it) ks.push_back(it.key());
  return ks;
}

}  // namespace

TEST(Driver, RuleMaskForms) {
  EXPECT_EQ(parse_rule_mask("255").bits, 0xFF);
  EXPECT_EQ(parse_rule_mask("0b101").bits, 0b101);
  EXPECT_EQ(parse_rule_mask("0x1f").bits, 0x1F);
  EXPECT_EQ(parse_rule_mask("0").bits, 0);
  EXPECT_THROW(parse_rule_mask("256"), std::invalid_argument);
  EXPECT_THROW(parse_rule_mask("0b"), std::invalid_argument);
  EXPECT_THROW(parse_rule_mask("12x"), std::invalid_argument);
  EXPECT_THROW(parse_rule_mask("-1"), std::invalid_argument);
}

TEST(Driver, GenParamsFromJson) {
  auto p = parse_gen_params(R"({"functions": 2, "properties": 5, "edge_density": 0.4})");
  EXPECT_EQ(p.functions, 2);
  EXPECT_EQ(p.properties, 5);
  EXPECT_DOUBLE_EQ(p.edge_density, 0.4);
  EXPECT_EQ(p.max_vertices, GenParams{}.max_vertices);
  EXPECT_THROW(parse_gen_params(R"({"fanout": 2})"), std::invalid_argument);
  EXPECT_THROW(parse_gen_params(R"({"functions": 0})"), std::invalid_argument);
}

TEST(Driver, JsonSchema) {
  RunConfig cfg;
  cfg.output = OutputKind::json;
  auto o = run_on(cfg, "running_example.vfg", "demo.prop");
  ASSERT_EQ(o.code, exit_code::ok) << o.err;
  auto j = nlohmann::ordered_json::parse(o.out);
  EXPECT_EQ(keys(j), (std::vector<std::string>{"plan", "properties", "stats"}));
  EXPECT_EQ(keys(j["plan"]), (std::vector<std::string>{"engine", "mode", "rule_mask", "groups", "directives"}));
  EXPECT_EQ(j["plan"]["rule_mask"], "0b11111111");
  EXPECT_EQ(keys(j["properties"][0]), (std::vector<std::string>{"name", "agg", "feasible_paths", "bugs"}));
  EXPECT_EQ(keys(j["stats"]),
            (std::vector<std::string>{"vertices_visited", "sat_queries", "core_extractions", "interpolations",
                                      "pruned_psc", "pruned_rule2", "pruned_rule34", "psc_checks_saved",
                                      "skeleton_steps", "psc_relation_queries", "aggregation_queries"}));
  EXPECT_EQ(j["stats"]["pruned_rule2"], 2);
  EXPECT_EQ(j["properties"][1]["bugs"].size(), 2u);
  EXPECT_EQ(keys(j["properties"][1]["bugs"][0]),
            (std::vector<std::string>{"verdict", "source", "witness", "condition"}));
}

TEST(Driver, EnginesAgreeOnBugs) {
  RunConfig cat;
  cat.output = OutputKind::json;
  RunConfig naive = cat;
  naive.engine = EngineKind::naive;
  auto a = nlohmann::ordered_json::parse(run_on(cat, "running_example.vfg", "full.prop").out);
  auto b = nlohmann::ordered_json::parse(run_on(naive, "running_example.vfg", "full.prop").out);
  EXPECT_EQ(a["properties"], b["properties"]);
  EXPECT_EQ(b["stats"]["pruned_rule2"], 0);
  EXPECT_EQ(b["plan"]["engine"], "naive");
  EXPECT_EQ(b["plan"]["groups"].size(), 4u);
}

TEST(Driver, GeneratedWorkloadsAgreeAcrossEngines) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    RunConfig cat;
    RunConfig naive;
    naive.engine = EngineKind::naive;
    auto a = analyze(cat, w.graph, w.specs);
    auto b = analyze(naive, w.graph, w.specs);
    EXPECT_EQ(report_json(w.graph, w.specs, a)["properties"], report_json(w.graph, w.specs, b)["properties"])
        << seed;
  }
}

TEST(Driver, SummaryModeMatchesIntra) {
  RunConfig intra;
  intra.output = OutputKind::json;
  RunConfig summary = intra;
  summary.mode = ModeKind::summary;
  auto a = nlohmann::ordered_json::parse(run_on(intra, "interprocedural_example.vfg", "interprocedural.prop").out);
  auto b = nlohmann::ordered_json::parse(run_on(summary, "interprocedural_example.vfg", "interprocedural.prop").out);
  EXPECT_EQ(a["properties"], b["properties"]);
  EXPECT_EQ(b["plan"]["mode"], "summary");
}

TEST(Driver, ExitCodes) {
  RunConfig cfg;
  auto bad = run_on(cfg, "demo.prop", "demo.prop");
  EXPECT_EQ(bad.code, exit_code::parse_error);
  EXPECT_NE(bad.err.find("line"), std::string::npos);

  EXPECT_EQ(run_on(cfg, "missing.vfg", "demo.prop").code, exit_code::parse_error);

  ::setenv("VFLOW_SOLVER_BUDGET", "1", 1);
  auto over = run_on(cfg, "running_example.vfg", "demo.prop");
  ::unsetenv("VFLOW_SOLVER_BUDGET");
  EXPECT_EQ(over.code, exit_code::budget_exceeded);

  cfg.verify_stores = true;
  EXPECT_EQ(run_on(cfg, "running_example.vfg", "full.prop").code, exit_code::ok);
}

TEST(Driver, GeneratedRun) {
  RunConfig cfg;
  cfg.seed = 42;
  std::ostringstream a, b, err;
  EXPECT_EQ(run(cfg, "", "", a, err), exit_code::ok);
  EXPECT_EQ(run(cfg, "", "", b, err), exit_code::ok);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("stats:"), std::string::npos);
}

TEST(Driver, TextReport) {
  RunConfig cfg;
  auto o = run_on(cfg, "running_example.vfg", "full.prop");
  ASSERT_EQ(o.code, exit_code::ok);
  EXPECT_NE(o.out.find("plan:"), std::string::npos);
  EXPECT_NE(o.out.find("leak"), std::string::npos);
  EXPECT_NE(o.out.find("pruned_rule2"), std::string::npos);
}
