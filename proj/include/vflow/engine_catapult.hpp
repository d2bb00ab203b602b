#pragma once

// Multi-property search. Properties with the same sources share one walk;
// facts learned while checking one property prune the others:
//
//   rule 1  check properties with more sink vertices first
//   rule 2  remember states that cannot reach a property's sinks
//   rule 3  remember edge sets whose guards conflict with a psc
//   rule 4  remember interpolants of such edge sets
//   rule 5  merge properties with identical source sets
//   rule 6  psc_i => psc_j: a satisfiable psc_i settles psc_j
//   rule 7  overlapping pscs: one joint check, split by unsat core on failure
//   rule 8  disjoint and exhaustive pscs: one unsat settles the other
//
// With every rule disabled the search degenerates to the naive engine,
// query for query.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vflow/engine_naive.hpp"
#include "vflow/error.hpp"
#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"
#include "vflow/solver.hpp"
#include "vflow/stats.hpp"
#include "vflow/walkers.hpp"

namespace vflow {

/// Bit i-1 enables rule i.
struct RuleMask {
  std::uint8_t bits = 0xFF;

  static RuleMask all() { return {0xFF}; }
  static RuleMask none() { return {0}; }
  bool on(int rule) const { return (bits >> (rule - 1)) & 1U; }
  RuleMask with(int rule, bool enabled) const {
    RuleMask m = *this;
    if (enabled) {
      m.bits |= static_cast<std::uint8_t>(1U << (rule - 1));
    } else {
      m.bits &= static_cast<std::uint8_t>(~(1U << (rule - 1)));
    }
    return m;
  }
};

struct CatapultOptions : EngineOptions {
  RuleMask rules{};
  std::optional<std::vector<std::string>> forced_order;
  std::uint64_t skeleton_budget = 1'000'000;
};

// ---------------------------------------------------------------------------
// Plans

struct PairRelation {
  int a = 0;  // property bits
  int b = 0;
  PscRelation a_to_b = PscRelation::overlapping;
  PscRelation b_to_a = PscRelation::overlapping;
  bool exhaustive = false;  // psc_a || psc_b is valid

  bool a_implies_b() const { return a_to_b == PscRelation::implies; }
  bool b_implies_a() const { return b_to_a == PscRelation::implies; }
  bool overlapping() const { return !a_implies_b() && !b_implies_a() && a_to_b == PscRelation::overlapping; }
  bool disjoint() const { return a_to_b == PscRelation::disjoint; }

  /// Strategy the engine uses for this pair.
  std::string strategy(const RuleMask& rules) const {
    if ((a_implies_b() || b_implies_a()) && rules.on(6)) return "implies-chain";
    if (overlapping() && rules.on(7)) return "joint-check";
    if (disjoint() && exhaustive && rules.on(8)) return "disjoint-pair";
    return "independent";
  }
};

struct TraversalGroup {
  std::vector<int> members;  // property bits, in psc-check order
  std::vector<VertexIndex> sources;
  std::uint64_t mask = 0;
  std::size_t sink_count = 0;
  std::vector<PairRelation> relations;
};

struct RecordingDirective {
  std::string kind;  // sink-reach | unsat-core | interpolant
  std::string from;
  std::string to;
};

struct Plan {
  std::vector<TraversalGroup> groups;  // in check order
  std::vector<RecordingDirective> directives;
  std::uint64_t relation_queries = 0;

  std::vector<std::vector<std::string>> check_order(const std::vector<PropertySpec>& specs) const {
    std::vector<std::vector<std::string>> out;
    for (const auto& g : groups) {
      std::vector<std::string> names;
      for (int b : g.members) names.push_back(specs[b].name);
      out.push_back(std::move(names));
    }
    return out;
  }
};

namespace detail {

inline const PropertySpec& spec_by_bit(const std::vector<PropertySpec>& specs, int bit) {
  for (const auto& s : specs) {
    if (s.bit == bit) return s;
  }
  throw std::out_of_range("no property with bit " + std::to_string(bit));
}

}  // namespace detail

inline Plan make_plans(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                       const CatapultOptions& opt = {}) {
  if (specs.empty()) throw std::invalid_argument("make_plans needs at least one property");
  MatchTable table(g, specs);
  const RuleMask& rules = opt.rules;

  std::map<std::string, std::size_t> forced_rank;
  if (opt.forced_order) {
    const auto& order = *opt.forced_order;
    std::set<std::string> names;
    for (const auto& s : specs) names.insert(s.name);
    std::set<std::string> given(order.begin(), order.end());
    if (given != names || order.size() != specs.size()) {
      throw std::invalid_argument("forced order must be a permutation of the loaded property names");
    }
    for (std::size_t i = 0; i < order.size(); ++i) forced_rank[order[i]] = i;
  }
  auto rank = [&](int bit) -> std::size_t {
    const auto& s = detail::spec_by_bit(specs, bit);
    return opt.forced_order ? forced_rank.at(s.name) : static_cast<std::size_t>(s.bit);
  };

  std::vector<int> bits;
  for (const auto& s : specs) bits.push_back(s.bit);
  std::sort(bits.begin(), bits.end(), [&](int a, int b) { return rank(a) < rank(b); });

  Plan plan;
  for (int b : bits) {
    TraversalGroup* into = nullptr;
    if (rules.on(5)) {
      for (auto& grp : plan.groups) {
        if (grp.sources == table.sources(b)) into = &grp;
      }
    }
    if (!into) {
      plan.groups.emplace_back();
      into = &plan.groups.back();
      into->sources = table.sources(b);
    }
    into->members.push_back(b);
    into->mask |= std::uint64_t{1} << b;
    into->sink_count += table.sinks(b).size();
  }

  if (rules.on(1) && !opt.forced_order) {
    auto name = [&](const TraversalGroup& grp) { return detail::spec_by_bit(specs, grp.members[0]).name; };
    std::stable_sort(plan.groups.begin(), plan.groups.end(),
                     [&](const TraversalGroup& x, const TraversalGroup& y) {
                       if (x.sink_count != y.sink_count) return x.sink_count > y.sink_count;
                       return name(x) < name(y);
                     });
  }

  bool relate = rules.on(6) || rules.on(7) || rules.on(8);
  Solver rel(opt.domain, opt.solver_budget);
  for (auto& grp : plan.groups) {
    if (!relate || grp.members.size() < 2) continue;
    for (std::size_t i = 0; i < grp.members.size(); ++i) {
      for (std::size_t j = i + 1; j < grp.members.size(); ++j) {
        PairRelation r;
        r.a = grp.members[i];
        r.b = grp.members[j];
        const Condition& pa = detail::spec_by_bit(specs, r.a).psc;
        const Condition& pb = detail::spec_by_bit(specs, r.b).psc;
        r.a_to_b = rel.classify_psc_pair(pa, pb);
        r.b_to_a = rel.classify_psc_pair(pb, pa);
        if (r.disjoint()) {
          r.exhaustive = rel.is_sat(Condition::negation(pa || pb)) == SatResult::unsat;
        }
        grp.relations.push_back(r);
      }
    }
    // Stronger pscs first: fewer members imply a stronger one.
    if (rules.on(6)) {
      auto implied_by = [&](int b) {
        int n = 0;
        for (const auto& r : grp.relations) {
          if (r.b == b && r.a_implies_b() && !r.b_implies_a()) ++n;
          if (r.a == b && r.b_implies_a() && !r.a_implies_b()) ++n;
        }
        return n;
      };
      std::stable_sort(grp.members.begin(), grp.members.end(),
                       [&](int x, int y) { return implied_by(x) < implied_by(y); });
    }
  }
  plan.relation_queries = rel.counters().sat_queries;

  for (std::size_t gi = 0; gi < plan.groups.size(); ++gi) {
    for (std::size_t gj = gi + 1; gj < plan.groups.size(); ++gj) {
      for (int x : plan.groups[gi].members) {
        for (int y : plan.groups[gj].members) {
          const auto& sx = detail::spec_by_bit(specs, x);
          const auto& sy = detail::spec_by_bit(specs, y);
          if (rules.on(2)) plan.directives.push_back({"sink-reach", sx.name, sy.name});
          if (rules.on(3) && (sx.psc == sy.psc || sx.psc.is_true())) {
            plan.directives.push_back({"unsat-core", sx.name, sy.name});
          }
          if (rules.on(4) && !sx.psc.is_true() && !sy.psc.is_true() && !(sx.psc == sy.psc)) {
            plan.directives.push_back({"interpolant", sx.name, sy.name});
          }
        }
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Stores

/// Per-state sink reachability: `reach` bits are known to reach a sink of
/// the property, `unreach` bits are known not to.
struct ReachInfo {
  std::uint64_t reach = 0;
  std::uint64_t unreach = 0;
};

class SinkReachStore {
 public:
  const ReachInfo* find(StateId s) const {
    return s < known_.size() && known_[s] ? &info_[s] : nullptr;
  }
  void put(StateId s, ReachInfo r) {
    if (s >= known_.size()) {
      known_.resize(s + 1, false);
      info_.resize(s + 1);
    }
    known_[s] = true;
    info_[s] = r;
  }
  std::size_t size() const { return static_cast<std::size_t>(std::count(known_.begin(), known_.end(), true)); }
  /// One past the largest state ever stored.
  StateId bound() const { return static_cast<StateId>(known_.size()); }

 private:
  std::vector<bool> known_;
  std::vector<ReachInfo> info_;
};

/// Bit values of one state given its children; unknown children contribute
/// nothing to `unreach`.
inline ReachInfo finalize_reach(std::uint64_t sink_mask, const std::vector<std::optional<ReachInfo>>& children) {
  ReachInfo r{sink_mask, ~sink_mask};
  for (const auto& c : children) {
    if (c) {
      r.reach |= c->reach;
      r.unreach &= c->unreach;
    } else {
      r.unreach = 0;
    }
  }
  r.unreach &= ~r.reach;
  return r;
}

struct ConflictEntry {
  std::vector<EdgeIndex> edges;  // sorted
  Condition psc = Condition::top();  // rule 3: the instance the edges conflict with
  std::optional<Condition> interpolant;  // rule 4
  bool rule3 = false;
};

class ConflictStore {
 public:
  int add(ConflictEntry e) {
    int id = static_cast<int>(entries_.size());
    if (e.edges.empty()) {
      roots_.push_back(id);
    } else {
      for (EdgeIndex x : e.edges) by_edge_[x].push_back(id);
    }
    entries_.push_back(std::move(e));
    return id;
  }
  const std::vector<ConflictEntry>& entries() const { return entries_; }
  const ConflictEntry& entry(int id) const { return entries_[id]; }
  const std::vector<int>& root_entries() const { return roots_; }
  const std::vector<int>& with_edge(EdgeIndex e) const {
    static const std::vector<int> none;
    auto it = by_edge_.find(e);
    return it == by_edge_.end() ? none : it->second;
  }

 private:
  std::vector<ConflictEntry> entries_;
  std::unordered_map<EdgeIndex, std::vector<int>> by_edge_;
  std::vector<int> roots_;
};

// ---------------------------------------------------------------------------
// Engine

template <class Walker>
class CatapultEngine {
 public:
  CatapultEngine(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs, Walker& walker,
                 const CatapultOptions& opt)
      : g_(g),
        specs_(specs),
        table_(g, specs),
        walker_(walker),
        opt_(opt),
        rules_(opt.rules),
        solver_(opt.domain, opt.solver_budget),
        rel_solver_(opt.domain, opt.solver_budget),
        on_path_(g.edges().size(), 0) {
    for (const auto& s : specs) by_bit_[s.bit] = &s;
  }

  AnalysisResult run() {
    plan_ = make_plans(g_, specs_, opt_);
    AnalysisResult result;
    result.paths.resize(specs_.size());
    out_ = &result.paths;
    for (const auto& grp : plan_.groups) run_group(grp);
    stats_.solver = solver_.counters();
    stats_.psc_relation_queries = plan_.relation_queries + rel_solver_.counters().sat_queries;
    result.stats = stats_;
    result.sort_paths();
    return result;
  }

  const Plan& plan() const { return plan_; }
  const SinkReachStore& reach_store() const { return reach_; }
  const ConflictStore& conflicts() const { return conflicts_; }
  const MatchTable& table() const { return table_; }

  /// Re-checks every store entry by brute force; throws InvariantViolation
  /// on the first unsound one. Reach entries whose subtree exceeds
  /// `max_states` are skipped. Uses an uncounted solver.
  void verify_stores(std::uint64_t max_states = 100'000) {
    Solver check(opt_.domain, opt_.solver_budget);
    for (std::size_t id = 0; id < conflicts_.entries().size(); ++id) {
      const ConflictEntry& e = conflicts_.entry(static_cast<int>(id));
      std::vector<Condition> guards;
      for (EdgeIndex x : e.edges) guards.push_back(g_.edge(x).guard);
      Condition core = Condition::conj(guards);
      if (e.rule3 && check.check(core && e.psc)) {
        throw InvariantViolation("conflict entry " + std::to_string(id) + " is satisfiable with its psc");
      }
      if (e.interpolant &&
          (!check.implies(core, *e.interpolant) || check.check(*e.interpolant && e.psc))) {
        throw InvariantViolation("conflict entry " + std::to_string(id) + " has an invalid interpolant");
      }
    }
    std::unordered_map<StateId, std::uint64_t> memo;
    std::uint64_t budget = max_states;
    // Exact reachable-sink bits below s, or nullopt past the budget.
    auto below = [&](auto&& self, StateId s) -> std::optional<std::uint64_t> {
      if (auto it = memo.find(s); it != memo.end()) return it->second;
      if (budget == 0) return std::nullopt;
      --budget;
      std::uint64_t bits = walker_.terminal_mask(s);
      auto kids = walker_.children(s);
      for (const Step& st : kids) {
        auto r = self(self, st.state);
        if (!r) return std::nullopt;
        bits |= *r;
      }
      memo.emplace(s, bits);
      return bits;
    };
    for (StateId s = 0; s < reach_.bound(); ++s) {
      const ReachInfo* r = reach_.find(s);
      if (!r) continue;
      auto truth = below(below, s);
      if (!truth) continue;
      if ((r->reach & ~*truth) || (r->unreach & *truth)) {
        throw InvariantViolation("sink-reach entry for state " + std::to_string(s) + " is unsound");
      }
    }
  }

 private:
  enum Status : std::uint8_t { unknown, sat, unsat };

  struct Frame {
    std::vector<Status> status;
  };

  void run_group(const TraversalGroup& grp) {
    group_ = &grp;
    pair_gate_.assign(grp.relations.size(), 0);
    for (VertexIndex src : grp.sources) {
      source_ = src;
      psc_.clear();
      for (int b : grp.members) psc_[b] = instantiate_psc(*by_bit_.at(b), g_.vertex(src));
      visit(walker_.root(src), grp.mask, std::nullopt);
    }
  }

  std::optional<ReachInfo> reach_of(StateId s) {
    if (auto r = walker_.static_reach(s)) return ReachInfo{*r, ~*r};
    if (const ReachInfo* r = reach_.find(s)) return *r;
    return std::nullopt;
  }

  /// Constraint-free walk used to finalize states the search did not enter.
  std::optional<ReachInfo> skeleton(StateId s) {
    if (auto r = reach_of(s)) return r;
    if (stats_.skeleton_steps >= opt_.skeleton_budget) return std::nullopt;
    ++stats_.skeleton_steps;
    auto kids = walker_.children(s);
    std::vector<std::optional<ReachInfo>> parts;
    for (const Step& st : kids) parts.push_back(skeleton(st.state));
    ReachInfo r = finalize_reach(walker_.terminal_mask(s), parts);
    reach_.put(s, r);
    return r;
  }

  void finalize(StateId s) {
    if (walker_.static_reach(s) || reach_.find(s)) return;
    auto kids = walker_.children(s);
    std::vector<std::optional<ReachInfo>> parts;
    for (const Step& st : kids) parts.push_back(skeleton(st.state));
    reach_.put(s, finalize_reach(walker_.terminal_mask(s), parts));
  }

  bool entry_conflicts(int id, int bit) {
    const ConflictEntry& e = conflicts_.entry(id);
    const Condition& psc = psc_.at(bit);
    if (rules_.on(3) && e.rule3 && (e.psc.is_true() || e.psc == psc)) return true;
    if (rules_.on(4) && e.interpolant) {
      auto key = std::make_tuple(id, psc.to_string());
      auto it = rule4_cache_.find(key);
      if (it == rule4_cache_.end()) {
        bool conflict = rel_solver_.is_sat(*e.interpolant && psc) == SatResult::unsat;
        it = rule4_cache_.emplace(key, conflict).first;
      }
      return it->second;
    }
    return false;
  }

  bool entry_on_path(int id) const {
    for (EdgeIndex x : conflicts_.entry(id).edges) {
      if (!on_path_[x]) return false;
    }
    return true;
  }

  /// Drops members of `live` that a recorded conflict rules out.
  void apply_entries(const std::vector<int>& ids, std::uint64_t& live, std::vector<Status>* status) {
    for (int id : ids) {
      if (!live) return;
      if (!entry_on_path(id)) continue;
      for (int b : group_->members) {
        std::uint64_t m = std::uint64_t{1} << b;
        if (!(live & m)) continue;
        if (status && (*status)[b] != unknown) continue;
        if (entry_conflicts(id, b)) {
          live &= ~m;
          ++stats_.pruned_rule34;
          if (status) (*status)[b] = unsat;
        }
      }
    }
  }

  std::vector<std::pair<Condition, EdgeIndex>> guard_parts() const {
    std::vector<std::pair<Condition, EdgeIndex>> parts;
    for (EdgeIndex e : path_.edges) {
      const Condition& gd = g_.edge(e).guard;
      if (!gd.is_true()) parts.emplace_back(gd, e);
    }
    return parts;
  }

  int record(const std::vector<std::pair<Condition, EdgeIndex>>& parts,
             const std::vector<std::size_t>& kept, const Condition& psc) {
    ConflictEntry entry;
    std::vector<Atom> atoms;
    bool atomic = true;
    for (std::size_t i : kept) {
      entry.edges.push_back(parts[i].second);
      if (parts[i].first.is_atom_conjunction()) {
        for (const auto& a : parts[i].first.atoms()) atoms.push_back(a);
      } else {
        atomic = false;
      }
    }
    std::sort(entry.edges.begin(), entry.edges.end());
    entry.edges.erase(std::unique(entry.edges.begin(), entry.edges.end()), entry.edges.end());
    entry.psc = psc;
    entry.rule3 = rules_.on(3);
    if (rules_.on(4) && atomic && psc.variables().size() == 1) {
      entry.interpolant = solver_.interpolant(atoms, psc);
    }
    if (!entry.rule3 && !entry.interpolant) return -1;
    return conflicts_.add(std::move(entry));
  }

  /// Core over the path's guards with `psc` fixed, recorded as a conflict.
  int learn(const Condition& psc) {
    auto parts = guard_parts();
    std::vector<Condition> conds;
    for (const auto& p : parts) conds.push_back(p.first);
    auto kept = solver_.minimize_core(conds, psc);
    return record(parts, kept, psc);
  }

  SatResult query(const Condition& c) {
    try {
      return solver_.is_sat(c);
    } catch (const SolverBudgetExceeded& e) {
      detail::rethrow_with_path(g_, path_.vertices, e);
    }
    return SatResult::sat;
  }

  /// Settles the psc of every live member at the current vertex.
  void check_pscs(std::vector<Status>& st, std::uint64_t& live, bool pc_known_sat) {
    const auto& members = group_->members;
    const auto& rel = group_->relations;
    Condition pc = Condition::conj(guards_);
    auto is_live = [&](int b) { return (live >> b) & 1U; };
    auto infer = [&](int b, Status s) {
      st[b] = s;
      ++stats_.psc_checks_saved;
    };
    auto propagate = [&] {
      bool changed = true;
      while (changed) {
        changed = false;
        for (const auto& r : rel) {
          if (!is_live(r.a) || !is_live(r.b)) continue;
          if (rules_.on(6)) {
            auto chain = [&](int strong, int weak) {
              if (st[strong] == sat && st[weak] == unknown) {
                infer(weak, sat);
                changed = true;
              } else if (st[weak] == unsat && st[strong] == unknown) {
                infer(strong, unsat);
                changed = true;
              }
            };
            if (r.a_implies_b()) chain(r.a, r.b);
            if (r.b_implies_a()) chain(r.b, r.a);
          }
          if (rules_.on(8) && r.disjoint() && r.exhaustive && pc_known_sat) {
            if (st[r.a] == unsat && st[r.b] == unknown) {
              infer(r.b, sat);
              changed = true;
            } else if (st[r.b] == unsat && st[r.a] == unknown) {
              infer(r.a, sat);
              changed = true;
            }
          }
        }
      }
    };
    auto learned = [&](int id) {
      if (id < 0) return;
      std::vector<int> one{id};
      apply_entries(one, live, &st);
    };

    for (int b : members) {
      if (!is_live(b) || st[b] != unknown) continue;
      if (rules_.on(7)) {
        for (std::size_t k = 0; k < rel.size(); ++k) {
          const auto& r = rel[k];
          if (!r.overlapping() || pair_gate_[k]) continue;
          int other = r.a == b ? r.b : r.b == b ? r.a : -1;
          if (other < 0 || !is_live(other) || st[other] != unknown) continue;
          if (query(pc && psc_.at(b) && psc_.at(other)) == SatResult::sat) {
            st[b] = sat;
            infer(other, sat);
            pc_known_sat = true;
            break;
          }
          ++pair_gate_[k];
          gated_.back().push_back(k);
          auto parts = guard_parts();
          std::vector<Condition> conds{psc_.at(b), psc_.at(other)};
          for (const auto& p : parts) conds.push_back(p.first);
          auto kept = solver_.minimize_core(conds, Condition::top());
          bool need_b = std::count(kept.begin(), kept.end(), 0U) > 0;
          bool need_other = std::count(kept.begin(), kept.end(), 1U) > 0;
          std::vector<std::size_t> guard_idx;
          for (auto i : kept) {
            if (i >= 2) guard_idx.push_back(i - 2);
          }
          if (!need_b) {
            infer(other, unsat);
            if (rules_.on(3) || rules_.on(4)) learned(record(parts, guard_idx, psc_.at(other)));
          }
          if (!need_other && st[b] == unknown) {
            infer(b, unsat);
            if (rules_.on(3) || rules_.on(4)) learned(record(parts, guard_idx, psc_.at(b)));
          }
          propagate();
          break;
        }
        propagate();
        if (st[b] != unknown || !is_live(b)) continue;
      }
      SatResult r = query(pc && psc_.at(b));
      if (r == SatResult::sat) {
        st[b] = sat;
        pc_known_sat = true;
      } else {
        st[b] = unsat;
        if (rules_.on(3) || rules_.on(4)) learned(learn(psc_.at(b)));
      }
      propagate();
    }
  }

  void visit(StateId s, std::uint64_t live, std::optional<EdgeIndex> in_edge) {
    if (rules_.on(2)) {
      if (auto r = reach_of(s)) {
        std::uint64_t drop = live & r->unreach;
        stats_.pruned_rule2 += static_cast<std::uint64_t>(std::popcount(drop));
        live &= ~drop;
      }
    }
    if (!live) return;

    path_.vertices.push_back(walker_.vertex(s));
    if (in_edge) {
      path_.edges.push_back(*in_edge);
      guards_.push_back(g_.edge(*in_edge).guard);
      on_path_[*in_edge] = 1;
    }
    gated_.emplace_back();

    if (rules_.on(3) || rules_.on(4)) {
      if (in_edge) {
        apply_entries(conflicts_.with_edge(*in_edge), live, nullptr);
      } else {
        apply_entries(conflicts_.root_entries(), live, nullptr);
      }
    }

    if (live) {
      ++stats_.vertices_visited;
      bool pc_known_sat = !in_edge || (g_.edge(*in_edge).guard.is_true() && parent_pc_sat_);
      std::vector<Status> st(specs_.size(), unknown);
      check_pscs(st, live, pc_known_sat);

      std::uint64_t ok = 0;
      for (int b : group_->members) {
        if (!((live >> b) & 1U)) continue;
        if (st[b] == sat) {
          ok |= std::uint64_t{1} << b;
        } else if (st[b] == unsat) {
          ++stats_.pruned_psc;
        }
      }

      std::uint64_t sinks = ok & walker_.terminal_mask(s);
      for (int b : group_->members) {
        if ((sinks >> b) & 1U) {
          (*out_)[b].push_back(FeasiblePath{by_bit_.at(b)->name, b, path_, Condition::conj(guards_),
                                            source_, walker_.vertex(s)});
        }
      }

      if (ok) {
        auto kids = walker_.children(s);
        bool saved = parent_pc_sat_;
        parent_pc_sat_ = true;  // some member is satisfiable here, so pc is
        for (const Step& c : kids) {
          std::uint64_t child_live = ok & walker_.subtree_mask(c.state);
          if (child_live) visit(c.state, child_live, c.edge);
        }
        parent_pc_sat_ = saved;
      }
    }

    if (rules_.on(2)) finalize(s);

    for (std::size_t k : gated_.back()) --pair_gate_[k];
    gated_.pop_back();
    if (in_edge) {
      on_path_[*in_edge] = 0;
      guards_.pop_back();
      path_.edges.pop_back();
    }
    path_.vertices.pop_back();
  }

  const ValueFlowGraph& g_;
  const std::vector<PropertySpec>& specs_;
  MatchTable table_;
  Walker& walker_;
  CatapultOptions opt_;
  RuleMask rules_;
  Solver solver_;
  Solver rel_solver_;
  Plan plan_;
  AnalysisStats stats_;
  std::map<int, const PropertySpec*> by_bit_;

  SinkReachStore reach_;
  ConflictStore conflicts_;
  std::map<std::tuple<int, std::string>, bool> rule4_cache_;

  const TraversalGroup* group_ = nullptr;
  VertexIndex source_ = 0;
  std::map<int, Condition> psc_;
  std::vector<std::vector<FeasiblePath>>* out_ = nullptr;
  Path path_;
  std::vector<Condition> guards_;
  std::vector<char> on_path_;
  std::vector<int> pair_gate_;
  std::vector<std::vector<std::size_t>> gated_;
  bool parent_pc_sat_ = true;
};

/// Intra mode over the linked graph.
inline AnalysisResult check_catapult(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                                     const CatapultOptions& opt = {}) {
  MatchTable table(g, specs);
  GraphWalker walker(g, table);
  CatapultEngine<GraphWalker> engine(g, specs, walker, opt);
  return engine.run();
}

/// Summary mode over stitched candidates.
inline AnalysisResult check_catapult(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                                     const std::vector<Candidate>& candidates,
                                     const CatapultOptions& opt = {}) {
  CandidateTrie trie(candidates);
  CatapultEngine<CandidateTrie> engine(g, specs, trie, opt);
  return engine.run();
}

}  // namespace vflow
