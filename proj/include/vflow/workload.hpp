#pragma once

// Seeded random programs and property batches for differential testing.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vflow/condition.hpp"
#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"

namespace vflow {

struct GenParams {
  int functions = 3;
  int min_vertices = 4;
  int max_vertices = 10;
  double edge_density = 0.2;
  double guard_probability = 0.5;
  int properties = 4;
  double sink_density = 0.2;

  void validate() const {
    auto fraction = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (functions < 1 || functions > 8) throw std::invalid_argument("functions must be in [1, 8]");
    if (min_vertices < 1 || max_vertices > 32 || min_vertices > max_vertices) {
      throw std::invalid_argument("vertex range must satisfy 1 <= min <= max <= 32");
    }
    if (properties < 1 || properties > 32) throw std::invalid_argument("properties must be in [1, 32]");
    if (!fraction(edge_density) || !fraction(guard_probability) || !fraction(sink_density)) {
      throw std::invalid_argument("densities and probabilities must be in [0, 1]");
    }
  }
};

struct Workload {
  ValueFlowGraph graph;
  std::vector<PropertySpec> specs;
};

namespace detail {

/// mt19937_64 with portable integer/real draws (the standard
/// distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  int between(int lo, int hi) { return lo + below(hi - lo + 1); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(below(static_cast<int>(xs.size())))];
  }

 private:
  std::mt19937_64 engine_;
};

struct GenVertex {
  std::string id;
  std::string variable;
  std::vector<StatementKind> roles;
  Condition occurrence = Condition::top();
  int function = 0;
};

struct GenEdge {
  int src;
  int dst;
  Condition guard;
};

class Generator {
 public:
  Generator(std::uint64_t seed, const GenParams& p) : rng_(seed), p_(p) {}

  Workload run() {
    p_.validate();
    arity_.resize(static_cast<std::size_t>(p_.functions));
    for (int f = 0; f < p_.functions; ++f) arity_[f] = f == 0 ? 0 : rng_.between(1, 2);
    for (int f = p_.functions - 1; f >= 0; --f) function_body(f);
    break_cycles();

    GraphBuilder b;
    for (const auto& e : externs()) b.declare_function(e.first, e.second, true);
    for (int f = 0; f < p_.functions; ++f) b.declare_function(fname(f), arity_[f]);
    for (const auto& v : vertices_) {
      b.add_vertex(Vertex{v.id, v.variable, v.roles, fname(v.function), v.occurrence});
    }
    for (const auto& e : edges_) b.add_edge(vertices_[e.src].id, vertices_[e.dst].id, e.guard);
    Workload w{b.build(), {}};
    w.specs = properties();
    return w;
  }

 private:
  static std::vector<std::pair<std::string, int>> externs() {
    return {{"src_a", 0}, {"src_b", 0}, {"snk_a", 1}, {"snk_b", 1}};
  }
  static std::string fname(int f) { return "f" + std::to_string(f); }

  std::string var(int f, int k) const { return "x" + std::to_string(f) + "_" + std::to_string(k); }

  Atom random_atom(int f) {
    std::vector<std::string> pool;
    for (int k = 0; k < 3; ++k) pool.push_back(var(f, k));
    for (int k = 0; k < 3; ++k) pool.push_back("g" + std::to_string(k));
    static const std::vector<CmpOp> ops{CmpOp::lt, CmpOp::le, CmpOp::eq, CmpOp::ne, CmpOp::ge, CmpOp::gt};
    CmpOp op = rng_.pick(ops);
    int form = rng_.below(10);
    const std::string& x = rng_.pick(pool);
    if (form < 7) return Atom::var_const(x, op, rng_.between(-3, 3));
    std::string y = rng_.pick(pool);
    if (y == x) y = pool[(std::find(pool.begin(), pool.end(), x) - pool.begin() + 1) % pool.size()];
    if (form < 9) return Atom::var_var(x, op, y);
    return Atom::sum_const(x, y, op, rng_.between(-3, 3));
  }

  Condition random_guard(int f) {
    if (!rng_.chance(p_.guard_probability)) return Condition::top();
    std::vector<Condition> atoms{Condition::of(random_atom(f))};
    if (rng_.chance(0.25)) atoms.push_back(Condition::of(random_atom(f)));
    return Condition::conj(atoms);
  }

  int add(int f, StatementKind k, const std::string& id_hint) {
    GenVertex v;
    v.id = fname(f) + "." + id_hint + std::to_string(counter_[f]++);
    v.variable = var(f, rng_.below(3));
    v.roles.push_back(std::move(k));
    v.function = f;
    vertices_.push_back(std::move(v));
    return static_cast<int>(vertices_.size()) - 1;
  }

  void function_body(int f) {
    int n = rng_.between(p_.min_vertices, p_.max_vertices);
    std::vector<int> local;
    for (int k = 0; k < arity_[f]; ++k) local.push_back(add(f, StatementKind::formal_param(k), "p"));
    int sites = 0;
    while (static_cast<int>(local.size()) < n - (f > 0 ? 1 : 0)) {
      int roll = rng_.below(100);
      if (f + 1 < p_.functions && roll < 15 && static_cast<int>(local.size()) + 2 <= n) {
        int callee = rng_.between(f + 1, p_.functions - 1);
        std::string site = "s" + std::to_string(sites++);
        int k = rng_.below(arity_[callee]);
        local.push_back(add(f, StatementKind::call_arg(fname(callee), k, site), "a"));
        local.push_back(add(f, StatementKind::call_ret(fname(callee), site), "r"));
      } else if (roll < 15 + static_cast<int>(p_.sink_density * 100)) {
        static const std::vector<int> sink_kinds{0, 1, 2, 3};
        switch (rng_.pick(sink_kinds)) {
          case 0: local.push_back(add(f, StatementKind::call_arg("snk_a", 0), "k")); break;
          case 1: local.push_back(add(f, StatementKind::call_arg("snk_b", 0), "k")); break;
          case 2: local.push_back(add(f, StatementKind::load(Slot::operand), "l")); break;
          default: local.push_back(add(f, StatementKind::store(Slot::address), "t")); break;
        }
        // Distinct site labels for repeated extern calls.
        auto& r = vertices_.back().roles.front();
        if (r.kind == Stmt::call) r.site = r.callee + "_" + std::to_string(sites++);
      } else if (roll < 35 + static_cast<int>(p_.sink_density * 100)) {
        int which = rng_.below(3);
        int v = which == 2 ? add(f, StatementKind::global(), "g")
                           : add(f, StatementKind::call_ret(which ? "src_b" : "src_a",
                                                            "src_" + std::to_string(sites++)),
                                 "c");
        if (rng_.chance(p_.guard_probability * 0.5)) {
          vertices_[v].occurrence = Condition::of(random_atom(f));
        }
        local.push_back(v);
      } else {
        local.push_back(add(f, StatementKind::assign(), "v"));
      }
    }
    if (f > 0) local.push_back(add(f, StatementKind::formal_ret(), "ret"));

    for (std::size_t j = 1; j < local.size(); ++j) {
      std::set<int> from;
      if (rng_.chance(0.85)) from.insert(local[rng_.below(static_cast<int>(j))]);
      for (std::size_t i = 0; i < j; ++i) {
        if (rng_.chance(p_.edge_density)) from.insert(local[i]);
      }
      for (int s : from) edges_.push_back({s, local[j], random_guard(f)});
    }
  }

  /// Drops intra edges until the linked graph is acyclic.
  void break_cycles() {
    for (;;) {
      auto cycle = find_cycle();
      if (cycle.empty()) return;
      int victim = *std::max_element(cycle.begin(), cycle.end());
      edges_.erase(edges_.begin() + victim);
    }
  }

  /// Intra edge indices on some cycle of the linked graph, or empty.
  std::vector<int> find_cycle() const {
    std::size_t n = vertices_.size();
    // Adjacency with intra edges tagged by index, bind edges by -1.
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      adj[static_cast<std::size_t>(edges_[i].src)].push_back({edges_[i].dst, static_cast<int>(i)});
    }
    std::map<std::pair<int, std::string>, std::vector<int>> site_args, site_rets;
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& r : vertices_[v].roles) {
        if (r.kind != Stmt::call || r.callee.rfind("f", 0) != 0) continue;
        auto key = std::make_pair(vertices_[v].function, r.site);
        (r.index < 0 ? site_rets : site_args)[key].push_back(static_cast<int>(v));
      }
    }
    for (const auto& [key, args] : site_args) {
      int callee = -1;
      for (const auto& r : vertices_[static_cast<std::size_t>(args[0])].roles) {
        if (r.kind == Stmt::call) callee = std::stoi(r.callee.substr(1));
      }
      for (std::size_t v = 0; v < n; ++v) {
        if (vertices_[v].function != callee) continue;
        for (const auto& r : vertices_[v].roles) {
          if (r.kind == Stmt::formal_ret) {
            for (int ret : site_rets[key]) adj[v].push_back({ret, -1});
          }
          if (r.kind == Stmt::formal_param) {
            for (int a : args) {
              for (const auto& ar : vertices_[static_cast<std::size_t>(a)].roles) {
                if (ar.index == r.index) adj[static_cast<std::size_t>(a)].push_back({static_cast<int>(v), -1});
              }
            }
          }
        }
      }
    }
    std::vector<int> color(n, 0);
    std::vector<std::pair<int, int>> stack;  // (vertex, edge used to enter)
    std::vector<int> found;
    auto dfs = [&](auto&& self, int v) -> bool {
      color[static_cast<std::size_t>(v)] = 1;
      for (const auto& [w, e] : adj[static_cast<std::size_t>(v)]) {
        stack.push_back({w, e});
        if (color[static_cast<std::size_t>(w)] == 1) {
          for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            if (it->second >= 0) found.push_back(it->second);
            if (it != stack.rbegin() && it->first == w) break;
          }
          return true;
        }
        if (color[static_cast<std::size_t>(w)] == 0 && self(self, w)) return true;
        stack.pop_back();
      }
      color[static_cast<std::size_t>(v)] = 2;
      return false;
    };
    for (std::size_t v = 0; v < n; ++v) {
      if (color[v] == 0) {
        stack.clear();
        stack.push_back({static_cast<int>(v), -1});
        if (dfs(dfs, static_cast<int>(v))) return found;
      }
    }
    return {};
  }

  std::vector<PropertySpec> properties() {
    auto expr = [](std::initializer_list<Pattern> ps) {
      PatternExpr e;
      for (const auto& p : ps) e.add(p);
      return e;
    };
    std::vector<PatternExpr> sources{
        expr({Pattern::call_ret("src_a")}),
        expr({Pattern::call_ret("src_b")}),
        expr({Pattern::global()}),
        expr({Pattern::call_ret("src_a"), Pattern::global()}),
    };
    std::vector<Pattern> sinks{Pattern::call_arg("snk_a", 0), Pattern::call_arg("snk_b", 0),
                               Pattern::load(Slot::operand), Pattern::store(Slot::address)};
    std::vector<Condition> pscs{
        Condition::top(),
        parse_atom_list("v == 0"),
        parse_atom_list("v != 0"),
        parse_atom_list("v > 0"),
        parse_atom_list("v <= 0"),
        parse_atom_list("v > 2"),
        parse_atom_list("v < 3"),
        parse_atom_list("v >= -1"),
    };
    std::vector<Aggregate> aggs{Aggregate::never, Aggregate::never, Aggregate::never_sim, Aggregate::must};

    std::vector<PropertySpec> out;
    for (int i = 0; i < p_.properties; ++i) {
      PropertySpec s;
      s.name = "p" + std::to_string(i);
      s.bit = i;
      s.src = rng_.pick(sources);
      s.sink.add(rng_.pick(sinks));
      if (rng_.chance(0.3)) s.sink.add(rng_.pick(sinks));
      s.psc = rng_.pick(pscs);
      s.agg = rng_.pick(aggs);
      out.push_back(std::move(s));
    }
    if (p_.properties >= 3) {
      out[1].src = out[0].src;
      out[2].sink.add(out[0].sink.alternatives().front());
    }
    return out;
  }

  Rng rng_;
  GenParams p_;
  std::vector<int> arity_;
  std::map<int, int> counter_;
  std::vector<GenVertex> vertices_;
  std::vector<GenEdge> edges_;
};

}  // namespace detail

/// Deterministic in (seed, params): the same inputs give the same graph
/// and properties on every platform.
inline Workload gen_workload(std::uint64_t seed, const GenParams& params = {}) {
  return detail::Generator(seed, params).run();
}

}  // namespace vflow
