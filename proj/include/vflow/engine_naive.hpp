#pragma once

// Per-property demand-driven search: from every source, a depth-first walk
// that checks pc && psc at each vertex and stops below unsatisfiable ones.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"
#include "vflow/solver.hpp"
#include "vflow/stats.hpp"
#include "vflow/walkers.hpp"

namespace vflow {

struct EngineOptions {
  Domain domain{};
  std::uint64_t solver_budget = default_solver_budget();
  int threads = 1;
};

namespace detail {

inline void rethrow_with_path(const ValueFlowGraph& g, const std::vector<VertexIndex>& vs,
                              const SolverBudgetExceeded& e) {
  std::string where;
  for (auto v : vs) where += (where.empty() ? "" : ", ") + g.vertex(v).id;
  throw SolverBudgetExceeded(std::string(e.what()) + " (path " + where + ")");
}

template <class Walker>
class NaiveSearch {
 public:
  NaiveSearch(const ValueFlowGraph& g, const MatchTable& table, Walker& walker, Solver& solver,
              AnalysisStats& stats)
      : g_(g), table_(table), walker_(walker), solver_(solver), stats_(stats) {}

  void run(const PropertySpec& spec, std::vector<FeasiblePath>& out) {
    spec_ = &spec;
    out_ = &out;
    for (VertexIndex src : table_.sources(spec.bit)) {
      psc_ = instantiate_psc(spec, g_.vertex(src));
      source_ = src;
      visit(walker_.root(src));
    }
  }

 private:
  void visit(StateId s) {
    ++stats_.vertices_visited;
    path_.vertices.push_back(walker_.vertex(s));
    SatResult r;
    try {
      r = solver_.is_sat(Condition::conj(guards_) && psc_);
    } catch (const SolverBudgetExceeded& e) {
      rethrow_with_path(g_, path_.vertices, e);
    }
    if (r == SatResult::unsat) {
      ++stats_.pruned_psc;
    } else {
      std::uint64_t bit = std::uint64_t{1} << spec_->bit;
      if (walker_.terminal_mask(s) & bit) {
        out_->push_back(FeasiblePath{spec_->name, spec_->bit, path_, Condition::conj(guards_),
                                     source_, walker_.vertex(s)});
      }
      // Copy: graph walkers may grow their state table while we recurse.
      auto kids = walker_.children(s);
      for (const Step& st : kids) {
        if (!(walker_.subtree_mask(st.state) & bit)) continue;
        guards_.push_back(g_.edge(st.edge).guard);
        path_.edges.push_back(st.edge);
        visit(st.state);
        path_.edges.pop_back();
        guards_.pop_back();
      }
    }
    path_.vertices.pop_back();
  }

  const ValueFlowGraph& g_;
  const MatchTable& table_;
  Walker& walker_;
  Solver& solver_;
  AnalysisStats& stats_;
  const PropertySpec* spec_ = nullptr;
  std::vector<FeasiblePath>* out_ = nullptr;
  Condition psc_ = Condition::top();
  VertexIndex source_ = 0;
  Path path_;
  std::vector<Condition> guards_;
};

template <class MakeWalker>
AnalysisResult run_naive(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                         const EngineOptions& opt, MakeWalker&& make_walker) {
  MatchTable table(g, specs);
  AnalysisResult result;
  result.paths.resize(specs.size());
  int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(specs.size())));
  std::vector<AnalysisStats> stats(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      Solver solver(opt.domain, opt.solver_budget);
      auto walker = make_walker(table);
      NaiveSearch search(g, table, walker, solver, stats[w]);
      for (std::size_t i = w; i < specs.size(); i += workers) {
        search.run(specs[i], result.paths[specs[i].bit]);
      }
      stats[w].solver += solver.counters();
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& s : stats) result.stats += s;
  result.sort_paths();
  return result;
}

}  // namespace detail

/// Intra mode: searches the linked graph, following call and return edges
/// with a matched call-site stack.
inline AnalysisResult check_naive(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                                  const EngineOptions& opt = {}) {
  return detail::run_naive(g, specs, opt,
                           [&](const MatchTable& t) { return GraphWalker(g, t); });
}

/// Summary mode: searches the prefix tree of stitched candidate paths.
inline AnalysisResult check_naive(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                                  const std::vector<Candidate>& candidates,
                                  const EngineOptions& opt = {}) {
  return detail::run_naive(g, specs, opt,
                           [&](const MatchTable&) { return CandidateTrie(candidates); });
}

}  // namespace vflow
