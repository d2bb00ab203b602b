#pragma once

// State spaces the engines traverse. A state is a vertex plus whatever
// context decides which edges may follow it.
//
// GraphWalker: the linked graph, state = (vertex, call-site stack).
// CandidateTrie: prefix tree of candidate paths, state = trie node.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"

namespace vflow {

using StateId = std::uint32_t;

struct Step {
  EdgeIndex edge;
  StateId state;
};

class GraphWalker {
 public:
  GraphWalker(const ValueFlowGraph& g, const MatchTable& table) : g_(&g), table_(&table) {}

  StateId root(VertexIndex v) { return intern(v, {}); }
  VertexIndex vertex(StateId s) const { return states_[s].vertex; }
  const std::vector<int>& context(StateId s) const { return states_[s].stack; }
  std::size_t state_count() const { return states_.size(); }

  const std::vector<Step>& children(StateId s) {
    if (!states_[s].expanded) {
      std::vector<Step> out;
      VertexIndex v = states_[s].vertex;
      for (EdgeIndex e : g_->out_edges(v)) {
        std::vector<int> stack = states_[s].stack;
        if (!step_context(g_->edge(e), stack)) continue;
        StateId c = intern(g_->edge(e).dst, std::move(stack));
        out.push_back({e, c});
      }
      states_[s].children = std::move(out);
      states_[s].expanded = true;
    }
    return states_[s].children;
  }

  std::uint64_t terminal_mask(StateId s) const { return table_->sink_mask(states_[s].vertex); }
  std::uint64_t subtree_mask(StateId) const { return ~std::uint64_t{0}; }
  std::optional<std::uint64_t> static_reach(StateId) const { return std::nullopt; }

 private:
  struct State {
    VertexIndex vertex;
    std::vector<int> stack;
    bool expanded = false;
    std::vector<Step> children;
  };

  StateId intern(VertexIndex v, std::vector<int> stack) {
    auto key = std::make_pair(v, stack);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<StateId>(states_.size());
    states_.push_back(State{v, std::move(stack), false, {}});
    ids_.emplace(std::move(key), id);
    return id;
  }

  const ValueFlowGraph* g_;
  const MatchTable* table_;
  std::vector<State> states_;
  std::map<std::pair<VertexIndex, std::vector<int>>, StateId> ids_;
};

/// A labelled candidate path: bit k set when the path is a source-to-sink
/// candidate of property k.
struct Candidate {
  Path path;
  std::uint64_t label = 0;
};

class CandidateTrie {
 public:
  explicit CandidateTrie(const std::vector<Candidate>& candidates) {
    for (const auto& c : candidates) insert(c);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      it->subtree = it->terminal;
      for (const auto& st : it->children) it->subtree |= nodes_[st.state].subtree;
    }
  }

  StateId root(VertexIndex v) {
    auto it = roots_.find(v);
    if (it != roots_.end()) return it->second;
    auto id = new_node(v);
    roots_.emplace(v, id);
    return id;
  }
  VertexIndex vertex(StateId s) const { return nodes_[s].vertex; }
  std::size_t state_count() const { return nodes_.size(); }
  const std::vector<Step>& children(StateId s) const { return nodes_[s].children; }
  std::uint64_t terminal_mask(StateId s) const { return nodes_[s].terminal; }
  std::uint64_t subtree_mask(StateId s) const { return nodes_[s].subtree; }
  std::optional<std::uint64_t> static_reach(StateId s) const { return nodes_[s].subtree; }

  /// Every labelled path stored in the trie, in traversal order.
  std::vector<Candidate> paths() const {
    std::vector<Candidate> out;
    for (auto& [v, r] : roots_) {
      Path p;
      collect(r, p, out);
    }
    return out;
  }

 private:
  struct Node {
    VertexIndex vertex;
    std::uint64_t terminal = 0;
    std::uint64_t subtree = 0;
    std::vector<Step> children;  // ordered by edge index
  };

  StateId new_node(VertexIndex v) {
    nodes_.push_back(Node{v, 0, 0, {}});
    return static_cast<StateId>(nodes_.size() - 1);
  }

  void insert(const Candidate& c) {
    if (c.path.vertices.empty() || c.label == 0) return;
    StateId cur = root(c.path.front());
    for (std::size_t i = 0; i < c.path.edges.size(); ++i) {
      EdgeIndex e = c.path.edges[i];
      auto& kids = nodes_[cur].children;
      auto pos = std::lower_bound(kids.begin(), kids.end(), e,
                                  [](const Step& s, EdgeIndex x) { return s.edge < x; });
      if (pos != kids.end() && pos->edge == e) {
        cur = pos->state;
        continue;
      }
      std::size_t at = static_cast<std::size_t>(pos - kids.begin());
      StateId n = new_node(c.path.vertices[i + 1]);
      auto& again = nodes_[cur].children;  // new_node may reallocate
      again.insert(again.begin() + static_cast<std::ptrdiff_t>(at), Step{e, n});
      cur = n;
    }
    nodes_[cur].terminal |= c.label;
  }

  void collect(StateId s, Path& p, std::vector<Candidate>& out) const {
    p.vertices.push_back(nodes_[s].vertex);
    if (nodes_[s].terminal) out.push_back({p, nodes_[s].terminal});
    for (const auto& st : nodes_[s].children) {
      p.edges.push_back(st.edge);
      collect(st.state, p, out);
      p.edges.pop_back();
    }
    p.vertices.pop_back();
  }

  std::vector<Node> nodes_;
  std::map<VertexIndex, StateId> roots_;
};

}  // namespace vflow
