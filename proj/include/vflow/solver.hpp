#pragma once

// Exact satisfiability over a bounded integer domain.
//
// Every variable ranges over [lo, hi]. A query is put in negation normal
// form, split into independent conjunct groups, and each group is decided
// by depth-first assignment with three-valued pruning and forward checking.
// Variables that only occur in single-variable atoms are enumerated over
// their breakpoints instead of the whole domain; this is exact because such
// atoms are constant between breakpoints.

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vflow/condition.hpp"

namespace vflow {

struct Domain {
  std::int64_t lo = -64;
  std::int64_t hi = 63;

  /// [-bound, bound - 1]; the default domain is symmetric(64).
  static Domain symmetric(std::int64_t bound) { return Domain{-bound, bound - 1}; }
  std::uint64_t size() const { return static_cast<std::uint64_t>(hi - lo + 1); }
  friend bool operator==(const Domain&, const Domain&) = default;
};

inline constexpr std::uint64_t kDefaultSolverBudget = 2'000'000;

/// Per-query assignment budget; `VFLOW_SOLVER_BUDGET` overrides the default.
inline std::uint64_t default_solver_budget() {
  if (const char* env = std::getenv("VFLOW_SOLVER_BUDGET")) {
    try {
      auto v = std::stoull(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return kDefaultSolverBudget;
}

struct SolverCounters {
  std::uint64_t sat_queries = 0;
  std::uint64_t core_extractions = 0;
  std::uint64_t interpolations = 0;

  SolverCounters& operator+=(const SolverCounters& o) {
    sat_queries += o.sat_queries;
    core_extractions += o.core_extractions;
    interpolations += o.interpolations;
    return *this;
  }
  friend bool operator==(const SolverCounters&, const SolverCounters&) = default;
};

enum class SatResult { sat, unsat };

enum class PscRelation { implies, overlapping, disjoint };

inline const char* to_string(PscRelation r) {
  switch (r) {
    case PscRelation::implies: return "implies";
    case PscRelation::overlapping: return "overlapping";
    case PscRelation::disjoint: return "disjoint";
  }
  return "?";
}

class SolverBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotUnsatError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

class BoundedSearch {
 public:
  BoundedSearch(Domain domain, std::uint64_t budget) : domain_(domain), budget_(budget) {}

  bool satisfiable(const Condition& c) {
    int root = compile(c, false);
    const Node& r = nodes_[root];
    if (r.kind == Node::t) return true;
    if (r.kind == Node::f) return false;

    std::vector<int> conjuncts = r.kind == Node::conj ? r.kids : std::vector<int>{root};
    std::vector<std::vector<int>> vars_of(conjuncts.size());
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      collect_vars(conjuncts[i], vars_of[i]);
      std::sort(vars_of[i].begin(), vars_of[i].end());
      vars_of[i].erase(std::unique(vars_of[i].begin(), vars_of[i].end()), vars_of[i].end());
    }

    // Union-find over variables to split independent groups.
    parent_.assign(names_.size(), 0);
    std::iota(parent_.begin(), parent_.end(), 0);
    for (auto& vs : vars_of) {
      for (std::size_t k = 1; k < vs.size(); ++k) unite(vs[0], vs[k]);
    }
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      if (vars_of[i].empty()) continue;  // constants were folded away
      groups[find(vars_of[i][0])].push_back(i);
    }

    value_.assign(names_.size(), 0);
    assigned_.assign(names_.size(), false);
    steps_ = 0;
    for (auto& [rep, members] : groups) {
      std::vector<int> group_conjuncts;
      std::map<int, int> occurrences;
      std::vector<int> first_seen;
      for (auto i : members) {
        group_conjuncts.push_back(conjuncts[i]);
        for (int v : vars_of[i]) {
          if (occurrences[v]++ == 0) first_seen.push_back(v);
        }
      }
      std::vector<int> order = first_seen;
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return occurrences[a] > occurrences[b]; });
      if (!solve_group(group_conjuncts, order)) return false;
    }
    return true;
  }

 private:
  struct CAtom {
    Atom::Form form;
    int x;
    int y;
    CmpOp op;
    std::int64_t c;
  };
  struct Node {
    enum Kind { t, f, atom, conj, disj } kind = t;
    int atom_index = -1;
    std::vector<int> kids;
  };

  int var_index(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  int make(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int const_node(bool v) { return make(Node{v ? Node::t : Node::f, -1, {}}); }

  int compile(const Condition& c, bool negated) {
    using K = Condition::Kind;
    switch (c.kind()) {
      case K::always: return const_node(!negated);
      case K::never: return const_node(negated);
      case K::neg: return compile(c.children().front(), !negated);
      case K::atom: {
        const Atom& a = c.atom();
        CAtom ca{a.form, var_index(a.lhs), -1, negated ? negate(a.op) : a.op, a.constant};
        if (a.form != Atom::Form::var_const) ca.y = var_index(a.rhs);
        // Variable-free atoms (x op x) fold to a constant.
        if (a.form == Atom::Form::var_var && ca.x == ca.y) {
          return const_node(compare(0, ca.op, 0));
        }
        atoms_.push_back(ca);
        return make(Node{Node::atom, static_cast<int>(atoms_.size()) - 1, {}});
      }
      case K::conj:
      case K::disj: {
        bool is_and = (c.kind() == K::conj) != negated;
        std::vector<int> kids;
        for (const auto& child : c.children()) {
          int k = compile(child, negated);
          auto kind = nodes_[k].kind;
          if (kind == (is_and ? Node::f : Node::t)) return const_node(!is_and);
          if (kind == (is_and ? Node::t : Node::f)) continue;
          if (kind == (is_and ? Node::conj : Node::disj)) {
            auto inner = nodes_[k].kids;
            kids.insert(kids.end(), inner.begin(), inner.end());
          } else {
            kids.push_back(k);
          }
        }
        if (kids.empty()) return const_node(is_and);
        if (kids.size() == 1) return kids.front();
        return make(Node{is_and ? Node::conj : Node::disj, -1, std::move(kids)});
      }
    }
    return const_node(true);
  }

  void collect_vars(int node, std::vector<int>& out) const {
    const Node& n = nodes_[node];
    if (n.kind == Node::atom) {
      const CAtom& a = atoms_[n.atom_index];
      out.push_back(a.x);
      if (a.y >= 0) out.push_back(a.y);
      return;
    }
    for (int k : n.kids) collect_vars(k, out);
  }

  void collect_atoms(int node, std::vector<int>& out) const {
    const Node& n = nodes_[node];
    if (n.kind == Node::atom) {
      out.push_back(n.atom_index);
      return;
    }
    for (int k : n.kids) collect_atoms(k, out);
  }

  int find(int v) {
    while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
    return v;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

  // 0 = false, 1 = true, 2 = unknown under the partial assignment.
  int eval(int node) const {
    const Node& n = nodes_[node];
    switch (n.kind) {
      case Node::t: return 1;
      case Node::f: return 0;
      case Node::atom: {
        const CAtom& a = atoms_[n.atom_index];
        if (!assigned_[a.x] || (a.y >= 0 && !assigned_[a.y])) return 2;
        std::int64_t left = value_[a.x];
        if (a.form == Atom::Form::sum_const) left += value_[a.y];
        std::int64_t right = a.form == Atom::Form::var_var ? value_[a.y] : a.c;
        return compare(left, a.op, right) ? 1 : 0;
      }
      case Node::conj: {
        int res = 1;
        for (int k : n.kids) {
          int r = eval(k);
          if (r == 0) return 0;
          if (r == 2) res = 2;
        }
        return res;
      }
      case Node::disj: {
        int res = 0;
        for (int k : n.kids) {
          int r = eval(k);
          if (r == 1) return 1;
          if (r == 2) res = 2;
        }
        return res;
      }
    }
    return 2;
  }

  std::vector<std::int64_t> candidates(int var, const std::vector<int>& group_atoms) const {
    std::vector<std::int64_t> pts{domain_.lo, domain_.hi};
    for (int ai : group_atoms) {
      const CAtom& a = atoms_[ai];
      bool mentions = a.x == var || a.y == var;
      if (!mentions) continue;
      bool unary = a.y < 0 || a.y == a.x;
      if (!unary) {
        pts.clear();
        for (std::int64_t v = domain_.lo; v <= domain_.hi; ++v) pts.push_back(v);
        return pts;
      }
      if (a.form == Atom::Form::var_const) {
        pts.insert(pts.end(), {a.c - 1, a.c, a.c + 1});
      } else if (a.form == Atom::Form::sum_const) {
        std::int64_t lo = a.c >= 0 ? a.c / 2 : -((-a.c + 1) / 2);
        pts.insert(pts.end(), {lo - 1, lo, lo + 1, lo + 2});
      }
    }
    for (auto& p : pts) p = std::clamp(p, domain_.lo, domain_.hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  bool solve_group(const std::vector<int>& conjuncts, const std::vector<int>& order) {
    std::vector<int> group_atoms;
    for (int c : conjuncts) collect_atoms(c, group_atoms);
    Group g;
    g.vars = order;
    for (int v : order) g.domain.push_back(candidates(v, group_atoms));
    g.slot.assign(names_.size(), -1);
    for (std::size_t k = 0; k < order.size(); ++k) g.slot[order[k]] = static_cast<int>(k);
    g.watch.resize(order.size());
    for (int c : conjuncts) {
      std::vector<int> vs;
      collect_vars(c, vs);
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      std::vector<int> slots;
      for (int v : vs) slots.push_back(g.slot[v]);
      if (slots.size() == 1) {
        // Single-variable conjuncts restrict the domain up front.
        int k = slots.front(), v = order[k];
        std::vector<std::int64_t> kept;
        assigned_[v] = true;
        for (std::int64_t x : g.domain[k]) {
          value_[v] = x;
          if (eval(c) != 0) kept.push_back(x);
        }
        assigned_[v] = false;
        if (kept.empty()) return false;
        g.domain[k] = std::move(kept);
        continue;
      }
      for (int k : slots) g.watch[k].push_back({c, slots});
    }
    bool ok = search(g, order.size());
    for (int v : order) assigned_[v] = false;
    return ok;
  }

  struct Watched {
    int conjunct;
    std::vector<int> slots;
  };
  struct Group {
    std::vector<int> vars;
    std::vector<std::vector<std::int64_t>> domain;
    std::vector<int> slot;
    std::vector<std::vector<Watched>> watch;
  };

  // Smallest remaining domain first; after each assignment, conjuncts left
  // with one open variable filter that variable's values.
  bool search(Group& g, std::size_t open) {
    if (open == 0) return true;
    int k = -1;
    for (std::size_t i = 0; i < g.vars.size(); ++i) {
      if (assigned_[g.vars[i]]) continue;
      if (k < 0 || g.domain[i].size() < g.domain[k].size()) k = static_cast<int>(i);
    }
    int var = g.vars[k];
    auto values = g.domain[k];
    assigned_[var] = true;
    for (std::int64_t v : values) {
      if (++steps_ > budget_) {
        throw SolverBudgetExceeded("solver budget of " + std::to_string(budget_) +
                                   " assignments exceeded");
      }
      value_[var] = v;
      std::vector<std::pair<int, std::vector<std::int64_t>>> trail;
      bool refuted = false;
      for (const Watched& w : g.watch[k]) {
        int last_open = -1, n_open = 0;
        for (int s : w.slots) {
          if (!assigned_[g.vars[s]]) {
            last_open = s;
            ++n_open;
          }
        }
        if (n_open == 0) {
          if (eval(w.conjunct) == 0) refuted = true;
        } else if (n_open == 1) {
          int y = g.vars[last_open];
          std::vector<std::int64_t> kept;
          assigned_[y] = true;
          for (std::int64_t yv : g.domain[last_open]) {
            value_[y] = yv;
            if (eval(w.conjunct) != 0) kept.push_back(yv);
          }
          assigned_[y] = false;
          if (kept.size() != g.domain[last_open].size()) {
            trail.push_back({last_open, std::move(g.domain[last_open])});
            g.domain[last_open] = std::move(kept);
            if (g.domain[last_open].empty()) refuted = true;
          }
        }
        if (refuted) break;
      }
      if (!refuted && search(g, open - 1)) return true;
      for (auto it = trail.rbegin(); it != trail.rend(); ++it) g.domain[it->first] = std::move(it->second);
    }
    assigned_[var] = false;
    return false;
  }

  Domain domain_;
  std::uint64_t budget_;
  std::uint64_t steps_ = 0;
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<CAtom> atoms_;
  std::vector<Node> nodes_;
  std::vector<int> parent_;
  std::vector<std::int64_t> value_;
  std::vector<bool> assigned_;
};

// sum(coef * var) < bound   (strict)   or   <= bound   (non-strict)
struct LinearConstraint {
  std::map<std::string, std::int64_t> coef;
  std::int64_t bound = 0;
  bool strict = false;
};

inline std::optional<std::vector<LinearConstraint>> to_linear(const Atom& a) {
  LinearConstraint base;
  base.coef[a.lhs] += 1;
  std::int64_t rhs = a.constant;
  if (a.form == Atom::Form::sum_const) base.coef[a.rhs] += 1;
  if (a.form == Atom::Form::var_var) {
    base.coef[a.rhs] -= 1;
    rhs = 0;
  }
  std::erase_if(base.coef, [](const auto& kv) { return kv.second == 0; });
  auto flipped = [&] {
    LinearConstraint c = base;
    for (auto& [_, k] : c.coef) k = -k;
    return c;
  };
  std::vector<LinearConstraint> out;
  switch (a.op) {
    case CmpOp::lt: out.push_back(base), out.back().bound = rhs, out.back().strict = true; break;
    case CmpOp::le: out.push_back(base), out.back().bound = rhs; break;
    case CmpOp::gt: out.push_back(flipped()), out.back().bound = -rhs, out.back().strict = true; break;
    case CmpOp::ge: out.push_back(flipped()), out.back().bound = -rhs; break;
    case CmpOp::eq:
      out.push_back(base), out.back().bound = rhs;
      out.push_back(flipped()), out.back().bound = -rhs;
      break;
    case CmpOp::ne: return std::nullopt;
  }
  return out;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace detail

class Solver {
 public:
  Solver() : Solver(Domain{}) {}
  explicit Solver(Domain domain, std::uint64_t budget = default_solver_budget())
      : domain_(domain), budget_(budget) {
    if (domain.lo > domain.hi) throw std::invalid_argument("empty solver domain");
  }

  const Domain& domain() const { return domain_; }
  std::uint64_t budget() const { return budget_; }
  SolverCounters& counters() { return counters_; }
  const SolverCounters& counters() const { return counters_; }

  /// Counted satisfiability query.
  SatResult is_sat(const Condition& c) {
    ++counters_.sat_queries;
    return check(c) ? SatResult::sat : SatResult::unsat;
  }

  /// Uncounted satisfiability check, for bookkeeping that is not a query.
  bool check(const Condition& c) const {
    detail::BoundedSearch search(domain_, budget_);
    return search.satisfiable(c);
  }

  bool valid(const Condition& c) const { return !check(Condition::negation(c)); }
  bool implies(const Condition& a, const Condition& b) const {
    return !check(a && Condition::negation(b));
  }
  bool equivalent(const Condition& a, const Condition& b) const {
    return implies(a, b) && implies(b, a);
  }

  /// Deletion-minimal subset (by index, in list order) of `parts` whose
  /// conjunction with `fixed` is unsat. Counts one core extraction.
  std::vector<std::size_t> minimize_core(const std::vector<Condition>& parts,
                                         const Condition& fixed) {
    std::vector<bool> keep(parts.size(), true);
    auto conj_of = [&](std::size_t skip) {
      std::vector<Condition> kept{fixed};
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (keep[i] && i != skip) kept.push_back(parts[i]);
      }
      return Condition::conj(kept);
    };
    if (check(conj_of(parts.size()))) {
      throw NotUnsatError("unsat core requested for a satisfiable conjunction");
    }
    ++counters_.core_extractions;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!check(conj_of(i))) keep[i] = false;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (keep[i]) out.push_back(i);
    }
    return out;
  }

  std::vector<Atom> unsat_core(const std::vector<Atom>& atoms, const Condition& psc) {
    std::vector<Condition> parts;
    parts.reserve(atoms.size());
    for (const auto& a : atoms) parts.push_back(Condition::of(a));
    std::vector<Atom> out;
    for (auto i : minimize_core(parts, psc)) out.push_back(atoms[i]);
    return out;
  }

  /// Projects `core` onto the single variable of `psc` by Fourier-Motzkin
  /// elimination over the rationals. Returns the resulting bounds when they
  /// contradict `psc`; nothing when a core atom uses != or no bound survives.
  std::optional<Condition> interpolant(const std::vector<Atom>& core, const Condition& psc) {
    auto psc_vars = psc.variables();
    if (psc_vars.size() != 1) {
      throw std::invalid_argument("interpolant requires a single-variable constraint");
    }
    const std::string v = *psc_vars.begin();
    std::vector<Condition> parts;
    for (const auto& a : core) parts.push_back(Condition::of(a));
    Condition core_cond = Condition::conj(parts);
    if (check(core_cond && psc)) {
      throw NotUnsatError("interpolant requested for a satisfiable conjunction");
    }
    ++counters_.interpolations;

    std::vector<detail::LinearConstraint> system;
    std::set<std::string> others;
    for (const auto& a : core) {
      auto lin = detail::to_linear(a);
      if (!lin) return std::nullopt;
      for (auto& c : *lin) {
        for (auto& [name, _] : c.coef) {
          if (name != v) others.insert(name);
        }
        system.push_back(std::move(c));
      }
    }
    for (const auto& w : others) {
      if (!eliminate(system, w)) return std::nullopt;
    }

    std::optional<std::pair<std::int64_t, Atom>> upper;  // tightest integer max
    std::optional<std::pair<std::int64_t, Atom>> lower;  // tightest integer min
    for (const auto& c : system) {
      auto it = c.coef.find(v);
      if (it == c.coef.end() || c.coef.size() != 1) continue;
      std::int64_t k = it->second;
      if (k > 0) {
        Atom a = c.strict ? Atom::var_const(v, CmpOp::lt, detail::ceil_div(c.bound, k))
                          : Atom::var_const(v, CmpOp::le, detail::floor_div(c.bound, k));
        std::int64_t max = a.op == CmpOp::lt ? a.constant - 1 : a.constant;
        if (!upper || max < upper->first) upper.emplace(max, a);
      } else {
        std::int64_t m = -k;
        Atom a = c.strict ? Atom::var_const(v, CmpOp::gt, detail::floor_div(-c.bound, m))
                          : Atom::var_const(v, CmpOp::ge, detail::ceil_div(-c.bound, m));
        std::int64_t min = a.op == CmpOp::gt ? a.constant + 1 : a.constant;
        if (!lower || min > lower->first) lower.emplace(min, a);
      }
    }
    std::vector<Condition> bounds;
    if (lower) bounds.push_back(Condition::of(lower->second));
    if (upper) bounds.push_back(Condition::of(upper->second));
    if (bounds.empty()) return std::nullopt;
    Condition result = Condition::conj(bounds);
    if (check(result && psc)) return std::nullopt;
    if (!implies(core_cond, result)) {
      throw std::logic_error("projection is not implied by its core");
    }
    return result;
  }

  /// Relation between two single-symbol constraints: implies when
  /// a && b == a, overlapping when a && b is satisfiable, else disjoint.
  /// Counted as sat queries on this solver.
  PscRelation classify_psc_pair(const Condition& a, const Condition& b) {
    if (is_sat(a && Condition::negation(b)) == SatResult::unsat) return PscRelation::implies;
    if (is_sat(a && b) == SatResult::sat) return PscRelation::overlapping;
    return PscRelation::disjoint;
  }

 private:
  static bool eliminate(std::vector<detail::LinearConstraint>& system, const std::string& w) {
    constexpr std::size_t kMaxConstraints = 4096;
    std::vector<detail::LinearConstraint> pos, neg, rest;
    for (auto& c : system) {
      auto it = c.coef.find(w);
      if (it == c.coef.end()) {
        rest.push_back(std::move(c));
      } else if (it->second > 0) {
        pos.push_back(std::move(c));
      } else {
        neg.push_back(std::move(c));
      }
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        std::int64_t a = p.coef.at(w);
        std::int64_t b = -n.coef.at(w);
        detail::LinearConstraint c;
        for (auto& [name, k] : p.coef) c.coef[name] += b * k;
        for (auto& [name, k] : n.coef) c.coef[name] += a * k;
        std::erase_if(c.coef, [](const auto& kv) { return kv.second == 0; });
        c.bound = b * p.bound + a * n.bound;
        c.strict = p.strict || n.strict;
        if (c.coef.empty()) continue;
        std::int64_t g = 0;
        for (auto& [_, k] : c.coef) g = std::gcd(g, k < 0 ? -k : k);
        if (g > 1 && c.bound % g == 0) {
          for (auto& [_, k] : c.coef) k /= g;
          c.bound /= g;
        }
        rest.push_back(std::move(c));
        if (rest.size() > kMaxConstraints) return false;
      }
    }
    system = std::move(rest);
    return true;
  }

  Domain domain_;
  std::uint64_t budget_;
  SolverCounters counters_;
};

}  // namespace vflow
