// One line per primary acceptance criterion; exit status is the number of
// failures.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"

using namespace vflow;

namespace {

constexpr std::uint64_t kCorpusSeeds = 1000;
constexpr double kCorpusSeconds = 300.0;
constexpr std::size_t kOracleMaxVertices = 12;
constexpr std::uint64_t kStitchInstances = 500;
constexpr std::uint64_t kRuleTwoDefault = 2;
constexpr std::uint64_t kRuleTwoReversed = 1;
constexpr int kAggDomain = 4;
constexpr int kAggBindings = 400;
constexpr int kGrowthProperties = 20;
constexpr std::uint64_t kGrowthSeedFirst = 100;
constexpr std::uint64_t kGrowthSeedCount = 16;
constexpr std::uint64_t kGrowthMinRetained = 10;
constexpr double kGrowthRatio = 0.8;
constexpr double kGrowthSeconds = 120.0;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome differential() {
  auto t0 = std::chrono::steady_clock::now();
  std::uint64_t mismatches = 0, paths = 0, bugs = 0, first_bad = 0;
  for (std::uint64_t seed = 0; seed < kCorpusSeeds; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    auto a = check_naive(w.graph, w.specs);
    auto b = check_catapult(w.graph, w.specs);
    Solver sa, sb;
    auto ba = aggregate(w.graph, w.specs, a, sa);
    auto bb = aggregate(w.graph, w.specs, b, sb);
    bool same = a.paths == b.paths && ba == bb;
    if (!same && mismatches++ == 0) first_bad = seed;
    for (const auto& ps : a.paths) paths += ps.size();
    for (const auto& bs : ba) bugs += bs.size();
  }
  double t = seconds_since(t0);
  std::string d = fmt("%llu seeds, %llu paths, %llu bug reports, %llu mismatches, %.1fs (limit %.0fs)",
                      (unsigned long long)kCorpusSeeds, (unsigned long long)paths, (unsigned long long)bugs,
                      (unsigned long long)mismatches, t, kCorpusSeconds);
  if (mismatches) d += fmt(", first at seed %llu", (unsigned long long)first_bad);
  return {mismatches == 0 && t < kCorpusSeconds, d};
}

Outcome oracle_equivalence() {
  std::uint64_t instances = 0, compared = 0, mismatches = 0;
  for (std::uint64_t seed = 0; seed < kCorpusSeeds; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    if (w.graph.vertex_count() > kOracleMaxVertices) continue;
    ++instances;
    auto r = check_naive(w.graph, w.specs);
    Solver s;
    for (const auto& spec : w.specs) {
      auto [src, snk] = oracle::endpoints(w.graph, spec);
      std::vector<VertexIndex> from, to;
      for (const auto& id : src) from.push_back(w.graph.index_of(id));
      for (const auto& id : snk) to.push_back(w.graph.index_of(id));
      std::set<oracle::IdPath> expected;
      for (const auto& p : enumerate_paths(w.graph, from, to)) {
        auto psc = spec.psc.substitute(kPscSymbol, w.graph.vertex(p.front()).variable);
        if (s.is_sat(oracle::guards_of(w.graph, vertex_ids(w.graph, p)) && psc) == SatResult::sat) {
          expected.insert(vertex_ids(w.graph, p));
        }
      }
      ++compared;
      if (oracle::as_id_set(w.graph, r.paths[spec.bit]) != expected) ++mismatches;
    }
  }
  return {mismatches == 0 && instances > 0,
          fmt("%llu instances with <= %zu vertices, %llu property sets compared, %llu mismatches",
              (unsigned long long)instances, kOracleMaxVertices, (unsigned long long)compared,
              (unsigned long long)mismatches)};
}

Outcome summary_sufficiency() {
  std::uint64_t instances = 0, mismatches = 0, paths = 0;
  for (std::uint64_t seed = 0; instances < kStitchInstances; ++seed) {
    auto p = oracle::corpus_params(seed);
    if (p.functions < 2) continue;
    ++instances;
    auto w = gen_workload(seed, p);
    auto stitched = stitch(w.graph, build_all_summaries(w.graph, w.specs, 1), w.specs);
    for (const auto& s : w.specs) {
      auto [src, snk] = oracle::endpoints(w.graph, s);
      std::vector<VertexIndex> from, to;
      for (const auto& id : src) from.push_back(w.graph.index_of(id));
      for (const auto& id : snk) to.push_back(w.graph.index_of(id));
      auto global = oracle::as_id_set(w.graph, enumerate_paths(w.graph, from, to));
      auto mine = oracle::as_id_set(w.graph, stitched[s.bit]);
      paths += global.size();
      if (mine != global || global != oracle::realizable_paths(w.graph, src, snk)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%llu multi-function instances, %llu paths, %llu mismatches",
                               (unsigned long long)instances, (unsigned long long)paths,
                               (unsigned long long)mismatches)};
}

Outcome order_sensitivity() {
  auto g = parse_program(oracle::slurp("running_example.vfg"));
  auto specs = parse_specs(oracle::slurp("demo.prop"));
  CatapultOptions def;
  def.forced_order = std::vector<std::string>{"free-glob-ptr", "null-deref"};
  CatapultOptions rev;
  rev.forced_order = std::vector<std::string>{"null-deref", "free-glob-ptr"};
  auto a = check_catapult(g, specs, def).stats.pruned_rule2;
  auto b = check_catapult(g, specs, rev).stats.pruned_rule2;
  auto planned = make_plans(g, specs).check_order(specs);
  bool default_first = !planned.empty() && planned.front() == std::vector<std::string>{"free-glob-ptr"};
  return {a == kRuleTwoDefault && b == kRuleTwoReversed && default_first,
          fmt("pruned_rule2 %llu (expected %llu), reversed %llu (expected %llu), planner picks free-glob-ptr first: %s",
              (unsigned long long)a, (unsigned long long)kRuleTwoDefault, (unsigned long long)b,
              (unsigned long long)kRuleTwoReversed, default_first ? "yes" : "no")};
}

Outcome interpolant_example() {
  Solver s;
  auto itp = s.interpolant({parse_atom("a + b > 3"), parse_atom("b < 0")}, parse_atom_list("a == 0"));
  if (!itp) return {false, "no interpolant returned"};
  bool eq = s.equivalent(*itp, parse_atom_list("a > 3"));
  return {eq, "interpolant " + itp->to_string() + (eq ? " is" : " is not") + " equivalent to a > 3"};
}

Outcome label_composition() {
  auto g = parse_program(oracle::slurp("interprocedural_example.vfg"));
  auto specs = parse_specs(oracle::slurp("interprocedural.prop"));
  auto cands = stitch_candidates(g, build_all_summaries(g, specs, 1), specs);
  for (const auto& c : cands) {
    if (vertex_ids(g, c.path) == std::vector<std::string>{"p", "ret_p", "a", "u", "free(u)"}) {
      auto label = PropertySet(static_cast<int>(specs.size()), c.label).to_string();
      return {label == "0b110", "(p, ret_p, a, u, free(u)) has label " + label};
    }
  }
  return {false, "path (p, ret_p, a, u, free(u)) not stitched"};
}

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

Outcome aggregation_formulas() {
  auto specs = parse_specs(oracle::slurp("full.prop"));
  EngineOptions opt;
  opt.domain = Domain::symmetric(kAggDomain);
  const auto lo = opt.domain.lo, hi = opt.domain.hi;
  auto truth = [&](const Condition& c) { return oracle::truth_table_sat(c, lo, hi); };

  std::mt19937_64 rng(2024);
  const std::vector<std::string> ops{"<", "<=", "==", "!=", ">=", ">"};
  auto atom = [&](const std::string& x) {
    return x + " " + ops[rng() % ops.size()] + " " + std::to_string(static_cast<int>(rng() % 7) - 3);
  };
  std::vector<std::array<std::string, 4>> bindings{{"x1 > 0", "x2 > 0", "a != 0", "x4 > 0"}};
  while (static_cast<int>(bindings.size()) < kAggBindings) {
    std::array<std::string, 4> b{atom("x1"), atom(rng() % 3 ? "x2" : "x1"), atom("a"), atom(rng() % 3 ? "x4" : "x2")};
    bool each = true;
    for (const auto& s : b) each = each && truth(parse_atom_list(s));
    if (each) bindings.push_back(b);
  }

  int mismatches = 0, sim_true = 0, must_true = 0;
  for (const auto& b : bindings) {
    auto g = parse_program(running_with(b[0], b[1], b[2], b[3]));
    auto r = check_naive(g, specs, opt);
    Solver s(opt.domain);
    auto bugs = aggregate(g, specs, r, s);
    auto g1 = parse_atom_list(b[0]), g2 = parse_atom_list(b[1]), g4 = parse_atom_list(b[3]);
    auto p = parse_atom_list("p != 0");
    bool sim = truth((g1 && g2) && (g1 && g4) && p);
    bool must = truth(!((g1 && g2) || (g1 && g4)) && g1 && p);
    mismatches += (!bugs[2].empty()) != sim;
    mismatches += (!bugs[3].empty()) != must;
    sim_true += sim;
    must_true += must;
  }
  return {mismatches == 0 && sim_true > 0 && must_true > 0,
          fmt("%zu bindings over [%lld, %lld], never-sim true %d, must true %d, %d mismatches", bindings.size(),
              (long long)lo, (long long)hi, sim_true, must_true, mismatches)};
}

Outcome growth() {
  auto t0 = std::chrono::steady_clock::now();
  GenParams p;
  p.functions = 3;
  p.properties = kGrowthProperties;
  std::vector<std::uint64_t> naive(kGrowthProperties + 1, 0), cat(kGrowthProperties + 1, 0);
  std::vector<std::uint64_t> screened;
  std::uint64_t retained = 0;
  for (std::uint64_t seed = kGrowthSeedFirst; seed < kGrowthSeedFirst + kGrowthSeedCount; ++seed) {
    auto w = gen_workload(seed, p);
    std::vector<std::uint64_t> n(kGrowthProperties + 1, 0), c(kGrowthProperties + 1, 0);
    for (int k = 1; k <= kGrowthProperties; ++k) {
      std::vector<PropertySpec> prefix(w.specs.begin(), w.specs.begin() + k);
      n[k] = check_naive(w.graph, prefix).stats.solver.sat_queries;
      c[k] = check_catapult(w.graph, prefix).stats.solver.sat_queries;
    }
    if (static_cast<double>(c[kGrowthProperties]) > kGrowthRatio * static_cast<double>(n[kGrowthProperties])) {
      screened.push_back(seed);
      continue;
    }
    ++retained;
    for (int k = 1; k <= kGrowthProperties; ++k) {
      naive[k] += n[k];
      cat[k] += c[k];
    }
  }
  bool slower_each_step = true;
  for (int k = 1; k <= kGrowthProperties; ++k) {
    auto dc = static_cast<std::int64_t>(cat[k]) - static_cast<std::int64_t>(cat[k - 1]);
    auto dn = static_cast<std::int64_t>(naive[k]) - static_cast<std::int64_t>(naive[k - 1]);
    slower_each_step = slower_each_step && dc < dn;
  }
  auto slope_n = naive[kGrowthProperties] - naive[1], slope_c = cat[kGrowthProperties] - cat[1];
  double ratio = naive[kGrowthProperties] ? static_cast<double>(cat[kGrowthProperties]) / naive[kGrowthProperties] : 1.0;
  double t = seconds_since(t0);

  std::ostringstream curve;
  for (int k = 1; k <= kGrowthProperties; ++k) curve << (k > 1 ? " " : "") << cat[k] << "/" << naive[k];
  std::ostringstream scr;
  for (auto s : screened) scr << " " << s;
  std::printf("  growth (catapult/naive cumulative sat_queries by property count): %s\n", curve.str().c_str());
  std::printf("  screened seeds:%s\n", screened.empty() ? " none" : scr.str().c_str());

  bool pass = retained >= kGrowthMinRetained && slower_each_step && slope_c < slope_n && ratio <= kGrowthRatio &&
              t < kGrowthSeconds;
  return {pass, fmt("%llu of %llu seeds retained, slope %llu vs %llu, ratio %.3f (limit %.2f), %.1fs (limit %.0fs)",
                    (unsigned long long)retained, (unsigned long long)kGrowthSeedCount, (unsigned long long)slope_c,
                    (unsigned long long)slope_n, ratio, kGrowthRatio, t, kGrowthSeconds)};
}

Outcome ablation() {
  CatapultOptions off;
  off.rules = RuleMask::none();
  std::uint64_t mismatches = 0;
  for (std::uint64_t seed = 0; seed < kCorpusSeeds; ++seed) {
    auto w = gen_workload(seed, oracle::corpus_params(seed));
    auto a = check_naive(w.graph, w.specs);
    auto b = check_catapult(w.graph, w.specs, off);
    mismatches += !(a.stats == b.stats && a.paths == b.paths);
  }
  return {mismatches == 0, fmt("%llu seeds with rule_mask 0, %llu stat mismatches", (unsigned long long)kCorpusSeeds,
                               (unsigned long long)mismatches)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"differential equivalence", differential},
      {"oracle equivalence", oracle_equivalence},
      {"summary sufficiency", summary_sufficiency},
      {"order sensitivity", order_sensitivity},
      {"interpolant example", interpolant_example},
      {"label composition", label_composition},
      {"aggregation formulas", aggregation_formulas},
      {"solver-call reduction", growth},
      {"ablation sanity", ablation},
  };
  int failures = 0;
  int k = 1;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", k++, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
