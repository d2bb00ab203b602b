#pragma once

// SSA value-flow graph: vertices are variable occurrences `v@s`, edges are
// guarded value flows. Cross-function edges (argument -> formal parameter,
// formal return -> call result) are synthesized from call statements.

#include <algorithm>
#include <compare>
#include <functional>
#include <tuple>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vflow/condition.hpp"
#include "vflow/error.hpp"

namespace vflow {

using VertexIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

enum class Stmt { call, load, store, assign, global, formal_param, formal_ret, other };

/// Which operand of a load/store a vertex stands for.
enum class Slot { none, operand, result, address, stored };

struct StatementKind {
  Stmt kind = Stmt::assign;
  std::string callee;      // call
  int index = -1;          // call: -1 for the returned value, k for argument k;
                           // formal_param: parameter index
  std::string site;        // call: call-site label, unique within the caller
  Slot slot = Slot::none;  // load / store
  std::string tag;         // other

  static StatementKind call_ret(std::string callee, std::string site = {}) {
    return call_arg(std::move(callee), -1, std::move(site));
  }
  static StatementKind call_arg(std::string callee, int arg, std::string site = {}) {
    StatementKind k;
    k.kind = Stmt::call;
    k.callee = std::move(callee);
    k.index = arg;
    k.site = site.empty() ? k.callee : std::move(site);
    return k;
  }
  static StatementKind load(Slot s = Slot::operand) { return of(Stmt::load, s); }
  static StatementKind store(Slot s = Slot::address) { return of(Stmt::store, s); }
  static StatementKind assign() { return of(Stmt::assign); }
  static StatementKind global() { return of(Stmt::global); }
  static StatementKind formal_param(int i) {
    StatementKind k = of(Stmt::formal_param);
    k.index = i;
    return k;
  }
  static StatementKind formal_ret() { return of(Stmt::formal_ret); }
  static StatementKind other(std::string tag) {
    StatementKind k = of(Stmt::other);
    k.tag = std::move(tag);
    return k;
  }
  static StatementKind of(Stmt kind, Slot slot = Slot::none) {
    StatementKind k;
    k.kind = kind;
    k.slot = slot;
    return k;
  }

  bool is_call_ret() const { return kind == Stmt::call && index < 0; }
  bool is_call_arg() const { return kind == Stmt::call && index >= 0; }

  /// `.vfg` KIND syntax; the site is printed only when it differs from the
  /// default (the callee name).
  std::string to_string() const {
    switch (kind) {
      case Stmt::call: {
        std::string s = "call " + callee + (index < 0 ? " ret" : " arg " + std::to_string(index));
        if (site != callee) s += " site " + site;
        return s;
      }
      case Stmt::load: return slot == Slot::result ? "load result" : "load operand";
      case Stmt::store: return slot == Slot::stored ? "store stored" : "store address";
      case Stmt::assign: return "assign";
      case Stmt::global: return "global";
      case Stmt::formal_param: return "param " + std::to_string(index);
      case Stmt::formal_ret: return "ret";
      case Stmt::other: return "other " + tag;
    }
    return {};
  }

  friend bool operator==(const StatementKind&, const StatementKind&) = default;
};

struct Vertex {
  std::string id;
  std::string variable;
  std::vector<StatementKind> roles;  // roles.front() is the defining statement
  std::string function;
  Condition occurrence = Condition::top();

  const StatementKind& statement() const { return roles.front(); }

  bool has_role(Stmt k) const {
    return std::any_of(roles.begin(), roles.end(),
                       [k](const StatementKind& r) { return r.kind == k; });
  }
  bool is_formal_param() const { return has_role(Stmt::formal_param); }
  bool is_formal_ret() const { return has_role(Stmt::formal_ret); }

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

enum class EdgeKind { intra, call_bind, ret_bind };

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::intra: return "intra";
    case EdgeKind::call_bind: return "call-bind";
    case EdgeKind::ret_bind: return "ret-bind";
  }
  return "?";
}

struct Edge {
  VertexIndex src = 0;
  VertexIndex dst = 0;
  Condition guard = Condition::top();
  EdgeKind kind = EdgeKind::intra;
  int site = -1;  // call-site index for call-bind / ret-bind edges

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct CallSite {
  std::string caller;
  std::string label;
  std::string callee;
  std::vector<VertexIndex> ret_vertices;
  std::map<int, std::vector<VertexIndex>> arg_vertices;
};

struct FunctionInfo {
  std::string name;
  int arity = 0;
  bool is_extern = false;
  std::vector<VertexIndex> vertices;
  std::vector<int> call_sites;
};

class ValueFlowGraph {
 public:
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vertex& vertex(VertexIndex v) const { return vertices_.at(v); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  std::size_t vertex_count() const { return vertices_.size(); }

  std::optional<VertexIndex> find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }
  VertexIndex index_of(const std::string& id) const {
    auto v = find(id);
    if (!v) throw std::out_of_range("no vertex '" + id + "'");
    return *v;
  }

  /// Outgoing edges ordered by target id, then edge kind.
  const std::vector<EdgeIndex>& out_edges(VertexIndex v) const { return out_.at(v); }
  const std::vector<EdgeIndex>& in_edges(VertexIndex v) const { return in_.at(v); }

  std::optional<EdgeIndex> edge_between(VertexIndex from, VertexIndex to) const {
    for (EdgeIndex e : out_.at(from)) {
      if (edges_[e].dst == to) return e;
    }
    return std::nullopt;
  }

  /// Functions in declaration order, externs included.
  const std::vector<FunctionInfo>& functions() const { return functions_; }
  const FunctionInfo* function(const std::string& name) const {
    auto it = function_index_.find(name);
    return it == function_index_.end() ? nullptr : &functions_[it->second];
  }

  /// Caller -> callees, restricted to functions with bodies.
  const std::map<std::string, std::set<std::string>>& call_graph() const { return call_graph_; }
  const std::vector<CallSite>& call_sites() const { return call_sites_; }
  const CallSite& call_site(int i) const { return call_sites_.at(i); }

  friend bool operator==(const ValueFlowGraph& a, const ValueFlowGraph& b) {
    if (a.vertices_ != b.vertices_ || a.edges_ != b.edges_) return false;
    if (a.functions_.size() != b.functions_.size()) return false;
    for (std::size_t i = 0; i < a.functions_.size(); ++i) {
      const auto& x = a.functions_[i];
      const auto& y = b.functions_[i];
      if (x.name != y.name || x.arity != y.arity || x.is_extern != y.is_extern) return false;
    }
    return true;
  }

 private:
  friend class GraphBuilder;

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, VertexIndex> by_id_;
  std::vector<std::vector<EdgeIndex>> out_;
  std::vector<std::vector<EdgeIndex>> in_;
  std::vector<FunctionInfo> functions_;
  std::unordered_map<std::string, std::size_t> function_index_;
  std::map<std::string, std::set<std::string>> call_graph_;
  std::vector<CallSite> call_sites_;
};

/// Accumulates declarations, then validates and links them in `build()`.
class GraphBuilder {
 public:
  void declare_function(const std::string& name, int arity, bool is_extern = false) {
    if (arity < 0) throw GraphError("negative arity for function '" + name + "'");
    if (declared_.count(name)) throw GraphError("function '" + name + "' declared twice");
    declared_[name] = functions_.size();
    functions_.push_back(FunctionInfo{name, arity, is_extern, {}, {}});
  }

  void add_vertex(Vertex v) {
    if (!declared_.count(v.function)) {
      throw GraphError("vertex '" + v.id + "' belongs to undeclared function '" + v.function + "'");
    }
    if (v.roles.empty()) throw GraphError("vertex '" + v.id + "' has no statement kind");
    pending_vertices_.push_back(std::move(v));
  }

  void add_edge(std::string src, std::string dst, Condition guard = Condition::top()) {
    pending_edges_.push_back({std::move(src), std::move(dst), std::move(guard)});
  }

  ValueFlowGraph build() const {
    ValueFlowGraph g;
    g.functions_ = functions_;
    for (auto& [name, i] : declared_) g.function_index_[name] = i;

    auto vertices = pending_vertices_;
    std::sort(vertices.begin(), vertices.end(),
              [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i && vertices[i].id == vertices[i - 1].id) {
        throw GraphError("duplicate vertex id '" + vertices[i].id + "'");
      }
      g.by_id_[vertices[i].id] = static_cast<VertexIndex>(i);
    }
    g.vertices_ = std::move(vertices);

    std::map<std::string, std::set<std::string>> vars_by_function;
    for (VertexIndex v = 0; v < g.vertices_.size(); ++v) {
      const Vertex& vx = g.vertices_[v];
      auto& fn = g.functions_[g.function_index_.at(vx.function)];
      if (fn.is_extern) throw GraphError("extern function '" + fn.name + "' cannot own vertices");
      fn.vertices.push_back(v);
      vars_by_function[vx.function].insert(vx.variable);
      validate_roles(g, vx);
    }
    check_occurrence_variables(g, vars_by_function);

    std::vector<Edge> edges;
    for (const auto& pe : pending_edges_) {
      auto s = g.find(pe.src);
      auto d = g.find(pe.dst);
      if (!s) throw GraphError("edge source '" + pe.src + "' is not a vertex");
      if (!d) throw GraphError("edge target '" + pe.dst + "' is not a vertex");
      if (g.vertices_[*s].function != g.vertices_[*d].function) {
        throw GraphError("edge " + pe.src + " -> " + pe.dst + " crosses functions");
      }
      edges.push_back(Edge{*s, *d, pe.guard, EdgeKind::intra, -1});
    }

    link_calls(g, edges);

    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.src, a.dst, a.kind) < std::tie(b.src, b.dst, b.kind);
    });
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (edges[i].src == edges[i - 1].src && edges[i].dst == edges[i - 1].dst) {
        throw GraphError("duplicate edge " + g.vertices_[edges[i].src].id + " -> " +
                         g.vertices_[edges[i].dst].id);
      }
    }
    g.edges_ = std::move(edges);
    g.out_.assign(g.vertices_.size(), {});
    g.in_.assign(g.vertices_.size(), {});
    for (EdgeIndex e = 0; e < g.edges_.size(); ++e) {
      g.out_[g.edges_[e].src].push_back(e);
      g.in_[g.edges_[e].dst].push_back(e);
    }

    check_call_graph_acyclic(g);
    check_acyclic(g);
    return g;
  }

 private:
  struct PendingEdge {
    std::string src;
    std::string dst;
    Condition guard;
  };

  static void validate_roles(const ValueFlowGraph& g, const Vertex& v) {
    const auto& fn = g.functions_[g.function_index_.at(v.function)];
    int rets = 0;
    for (const auto& r : v.roles) {
      if (r.kind == Stmt::formal_param && (r.index < 0 || r.index >= fn.arity)) {
        throw GraphError("vertex '" + v.id + "': parameter index " + std::to_string(r.index) +
                         " outside arity " + std::to_string(fn.arity) + " of '" + fn.name + "'");
      }
      if (r.kind == Stmt::formal_ret) ++rets;
      if (r.kind == Stmt::call) {
        auto it = g.function_index_.find(r.callee);
        if (it == g.function_index_.end()) {
          throw GraphError("vertex '" + v.id + "': unknown callee '" + r.callee + "'");
        }
        int arity = g.functions_[it->second].arity;
        if (r.index >= arity) {
          throw GraphError("vertex '" + v.id + "': arity mismatch, '" + r.callee + "' takes " +
                           std::to_string(arity) + " argument(s), got arg " +
                           std::to_string(r.index));
        }
      }
    }
    if (rets > 1) throw GraphError("vertex '" + v.id + "' has more than one ret kind");
  }

  static void check_occurrence_variables(
      const ValueFlowGraph& g, const std::map<std::string, std::set<std::string>>& vars) {
    std::map<std::string, std::set<std::string>> owners;
    for (auto& [fn, vs] : vars) {
      for (auto& v : vs) owners[v].insert(fn);
    }
    for (const auto& vx : g.vertices_) {
      for (const auto& name : vx.occurrence.variables()) {
        auto it = owners.find(name);
        if (it != owners.end() && !it->second.count(vx.function)) {
          throw GraphError("vertex '" + vx.id + "': occurrence condition uses variable '" +
                           name + "' of another function");
        }
      }
    }
  }

  static void link_calls(ValueFlowGraph& g, std::vector<Edge>& edges) {
    std::map<std::pair<std::string, std::string>, int> site_index;
    for (VertexIndex v = 0; v < g.vertices_.size(); ++v) {
      const Vertex& vx = g.vertices_[v];
      for (const auto& r : vx.roles) {
        if (r.kind != Stmt::call) continue;
        auto key = std::make_pair(vx.function, r.site);
        auto [it, fresh] = site_index.emplace(key, static_cast<int>(g.call_sites_.size()));
        if (fresh) g.call_sites_.push_back(CallSite{vx.function, r.site, r.callee, {}, {}});
        CallSite& cs = g.call_sites_[it->second];
        if (cs.callee != r.callee) {
          throw GraphError("call site '" + r.site + "' in '" + vx.function +
                           "' names two callees ('" + cs.callee + "', '" + r.callee + "')");
        }
        if (r.index < 0) {
          cs.ret_vertices.push_back(v);
        } else {
          cs.arg_vertices[r.index].push_back(v);
        }
      }
    }
    for (int s = 0; s < static_cast<int>(g.call_sites_.size()); ++s) {
      const CallSite& cs = g.call_sites_[s];
      auto& caller = g.functions_[g.function_index_.at(cs.caller)];
      caller.call_sites.push_back(s);
      const auto& callee = g.functions_[g.function_index_.at(cs.callee)];
      if (callee.is_extern) continue;
      g.call_graph_[cs.caller].insert(cs.callee);
      for (VertexIndex fv : callee.vertices) {
        const Vertex& f = g.vertices_[fv];
        for (const auto& r : f.roles) {
          if (r.kind == Stmt::formal_param) {
            auto it = cs.arg_vertices.find(r.index);
            if (it == cs.arg_vertices.end()) continue;
            for (VertexIndex a : it->second) {
              edges.push_back(Edge{a, fv, Condition::top(), EdgeKind::call_bind, s});
            }
          } else if (r.kind == Stmt::formal_ret) {
            for (VertexIndex rv : cs.ret_vertices) {
              edges.push_back(Edge{fv, rv, Condition::top(), EdgeKind::ret_bind, s});
            }
          }
        }
      }
    }
    for (auto& fn : g.functions_) {
      if (!fn.is_extern) g.call_graph_.try_emplace(fn.name);
    }
  }

  static void check_call_graph_acyclic(const ValueFlowGraph& g) {
    std::map<std::string, int> state;  // 1 = on stack, 2 = done
    std::function<void(const std::string&)> visit = [&](const std::string& f) {
      state[f] = 1;
      auto it = g.call_graph_.find(f);
      if (it != g.call_graph_.end()) {
        for (const auto& c : it->second) {
          if (state[c] == 1) throw GraphError("recursive call cycle through '" + c + "'");
          if (state[c] == 0) visit(c);
        }
      }
      state[f] = 2;
    };
    for (auto& [f, _] : g.call_graph_) {
      if (state[f] == 0) visit(f);
    }
  }

  static void check_acyclic(const ValueFlowGraph& g) {
    std::vector<std::size_t> indegree(g.vertices_.size(), 0);
    for (const auto& e : g.edges_) ++indegree[e.dst];
    std::vector<VertexIndex> ready;
    for (VertexIndex v = 0; v < indegree.size(); ++v) {
      if (indegree[v] == 0) ready.push_back(v);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
      VertexIndex v = ready.back();
      ready.pop_back();
      ++seen;
      for (EdgeIndex e : g.out_[v]) {
        if (--indegree[g.edges_[e].dst] == 0) ready.push_back(g.edges_[e].dst);
      }
    }
    if (seen != g.vertices_.size()) {
      for (VertexIndex v = 0; v < indegree.size(); ++v) {
        if (indegree[v] != 0) {
          throw GraphError("cyclic value flow through '" + g.vertices_[v].id + "'");
        }
      }
    }
  }

  std::vector<FunctionInfo> functions_;
  std::map<std::string, std::size_t> declared_;
  std::vector<Vertex> pending_vertices_;
  std::vector<PendingEdge> pending_edges_;
};

// ---------------------------------------------------------------------------
// Paths

struct Path {
  std::vector<VertexIndex> vertices;
  std::vector<EdgeIndex> edges;  // edges[i] joins vertices[i] and vertices[i + 1]

  std::size_t size() const { return vertices.size(); }
  VertexIndex front() const { return vertices.front(); }
  VertexIndex back() const { return vertices.back(); }

  friend bool operator==(const Path& a, const Path& b) { return a.vertices == b.vertices; }
  friend auto operator<=>(const Path& a, const Path& b) { return a.vertices <=> b.vertices; }
};

class ConcatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Builds a path from a vertex sequence, resolving the joining edges.
inline Path make_path(const ValueFlowGraph& g, std::vector<VertexIndex> seq) {
  Path p;
  p.vertices = std::move(seq);
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    auto e = g.edge_between(p.vertices[i], p.vertices[i + 1]);
    if (!e) {
      throw ConcatError("no edge " + g.vertex(p.vertices[i]).id + " -> " +
                        g.vertex(p.vertices[i + 1]).id);
    }
    p.edges.push_back(*e);
  }
  return p;
}

inline Path make_path(const ValueFlowGraph& g, const std::vector<std::string>& ids) {
  std::vector<VertexIndex> seq;
  for (const auto& id : ids) seq.push_back(g.index_of(id));
  return make_path(g, std::move(seq));
}

inline Path concat(const ValueFlowGraph& g, const Path& p1, const Path& p2) {
  if (p1.vertices.empty()) return p2;
  if (p2.vertices.empty()) return p1;
  auto e = g.edge_between(p1.back(), p2.front());
  if (!e) {
    throw ConcatError("concatenation undefined: no edge " + g.vertex(p1.back()).id + " -> " +
                      g.vertex(p2.front()).id);
  }
  Path out = p1;
  out.edges.push_back(*e);
  out.vertices.insert(out.vertices.end(), p2.vertices.begin(), p2.vertices.end());
  out.edges.insert(out.edges.end(), p2.edges.begin(), p2.edges.end());
  return out;
}

inline std::vector<std::string> vertex_ids(const ValueFlowGraph& g, const Path& p) {
  std::vector<std::string> out;
  for (auto v : p.vertices) out.push_back(g.vertex(v).id);
  return out;
}

inline std::string to_string(const ValueFlowGraph& g, const Path& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (i) out += ", ";
    out += g.vertex(p.vertices[i]).id;
  }
  return out + ")";
}

/// Call-site stack discipline for walking linked graphs. `realizable`
/// matches every return with the call it leaves through; returns with an
/// empty stack exit the starting function. `any` follows every edge.
enum class ContextPolicy { realizable, any };

/// One step of the call-site stack; false when the edge is not realizable.
inline bool step_context(const Edge& e, std::vector<int>& stack) {
  switch (e.kind) {
    case EdgeKind::intra: return true;
    case EdgeKind::call_bind: stack.push_back(e.site); return true;
    case EdgeKind::ret_bind:
      if (stack.empty()) return true;
      if (stack.back() != e.site) return false;
      stack.pop_back();
      return true;
  }
  return false;
}

/// Every path from a vertex of `from` to a vertex of `to`, in lexicographic
/// order of vertex ids. Brute force; meant as a reference.
inline std::vector<Path> enumerate_paths(const ValueFlowGraph& g,
                                         const std::vector<VertexIndex>& from,
                                         const std::vector<VertexIndex>& to,
                                         ContextPolicy policy = ContextPolicy::realizable) {
  std::vector<bool> target(g.vertex_count(), false);
  for (auto v : to) target.at(v) = true;
  std::vector<Path> out;
  Path cur;
  std::vector<int> stack;
  auto dfs = [&](auto&& self, VertexIndex v) -> void {
    cur.vertices.push_back(v);
    if (target[v]) out.push_back(cur);
    for (EdgeIndex e : g.out_edges(v)) {
      const Edge& edge = g.edge(e);
      auto saved = stack;
      if (policy == ContextPolicy::realizable && !step_context(edge, stack)) continue;
      cur.edges.push_back(e);
      self(self, edge.dst);
      cur.edges.pop_back();
      stack = std::move(saved);
    }
    cur.vertices.pop_back();
  };
  std::vector<VertexIndex> roots(from.begin(), from.end());
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  for (auto r : roots) {
    stack.clear();
    dfs(dfs, r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Path classes

enum class PathClass { intra_procedural, same_level, input, output, general };

inline const char* to_string(PathClass c) {
  switch (c) {
    case PathClass::intra_procedural: return "IP";
    case PathClass::same_level: return "SL";
    case PathClass::input: return "IN";
    case PathClass::output: return "OUT";
    case PathClass::general: return "GENERAL";
  }
  return "?";
}

/// Function instance of every vertex on the path: the function name plus
/// the call-site stack measured from the outermost frame the path visits.
/// Empty when the path is not realizable.
struct PathInstances {
  std::vector<std::string> functions;
  std::vector<std::vector<int>> contexts;
};

inline std::optional<PathInstances> path_instances(const ValueFlowGraph& g, const Path& p) {
  // First pass: call sites the path climbs out through with an empty stack.
  std::vector<int> stack;
  std::vector<int> climbed;
  for (EdgeIndex e : p.edges) {
    const Edge& edge = g.edge(e);
    if (edge.kind == EdgeKind::ret_bind && stack.empty()) {
      climbed.push_back(edge.site);
      continue;
    }
    if (!step_context(edge, stack)) return std::nullopt;
  }
  PathInstances out;
  std::vector<int> ctx(climbed.rbegin(), climbed.rend());
  out.functions.push_back(g.vertex(p.vertices[0]).function);
  out.contexts.push_back(ctx);
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const Edge& edge = g.edge(p.edges[i]);
    if (!step_context(edge, ctx)) return std::nullopt;
    out.functions.push_back(g.vertex(p.vertices[i + 1]).function);
    out.contexts.push_back(ctx);
  }
  return out;
}

namespace detail {
inline bool is_prefix(const std::vector<int>& prefix, const std::vector<int>& whole) {
  return prefix.size() <= whole.size() && std::equal(prefix.begin(), prefix.end(), whole.begin());
}
}  // namespace detail

/// Input/output shapes take precedence over intra-procedural/same-level
/// when the endpoint kinds fit: a formal parameter flowing down to a
/// non-return vertex is IN, a value flowing up to a formal return from a
/// non-parameter head is OUT. Parameter-to-return paths are classified as
/// IP or SL.
inline PathClass classify_path(const ValueFlowGraph& g, const Path& p) {
  auto inst = path_instances(g, p);
  if (!inst) return PathClass::general;
  const Vertex& head = g.vertex(p.front());
  const Vertex& tail = g.vertex(p.back());
  const auto& hctx = inst->contexts.front();
  const auto& tctx = inst->contexts.back();
  bool head_fp = head.is_formal_param();
  bool tail_fr = tail.is_formal_ret();

  if (tail_fr && !head_fp && detail::is_prefix(tctx, hctx)) return PathClass::output;
  if (head_fp && !tail_fr && detail::is_prefix(hctx, tctx)) return PathClass::input;

  bool all_same = true;
  for (std::size_t i = 1; i < p.vertices.size(); ++i) {
    if (inst->functions[i] != inst->functions[0] || inst->contexts[i] != hctx) {
      all_same = false;
      break;
    }
  }
  if (all_same) return PathClass::intra_procedural;
  if (inst->functions.front() == inst->functions.back() && hctx == tctx) {
    return PathClass::same_level;
  }
  return PathClass::general;
}

}  // namespace vflow
