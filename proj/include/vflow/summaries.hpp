#pragma once

// Bottom-up function summaries and their composition into complete
// source-to-sink candidate paths.
//
//   transfer  formal parameter -> formal return
//   input     formal parameter -> sink (in f or below)
//   output    source (in f or below) -> formal return
//
// Inside a function, same-level paths follow intra edges and step over
// call sites through the callee's transfer summaries.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "vflow/error.hpp"
#include "vflow/graph.hpp"
#include "vflow/propspec.hpp"
#include "vflow/vfg_format.hpp"
#include "vflow/walkers.hpp"

namespace vflow {

enum class SummaryKind { transfer, input, output };

inline const char* to_string(SummaryKind k) {
  switch (k) {
    case SummaryKind::transfer: return "transfer";
    case SummaryKind::input: return "input";
    case SummaryKind::output: return "output";
  }
  return "?";
}

struct Summary {
  SummaryKind kind = SummaryKind::transfer;
  Path path;
  PropertySet label;
  std::string function;

  friend bool operator==(const Summary& a, const Summary& b) {
    return a.kind == b.kind && a.path == b.path && a.label == b.label && a.function == b.function;
  }
};

struct FunctionSummaries {
  std::vector<Summary> transfer;
  std::vector<Summary> input;
  std::vector<Summary> output;

  std::vector<Summary>& of(SummaryKind k) {
    return k == SummaryKind::transfer ? transfer : k == SummaryKind::input ? input : output;
  }
  const std::vector<Summary>& of(SummaryKind k) const {
    return k == SummaryKind::transfer ? transfer : k == SummaryKind::input ? input : output;
  }
  std::size_t size() const { return transfer.size() + input.size() + output.size(); }
  friend bool operator==(const FunctionSummaries&, const FunctionSummaries&) = default;
};

using SummaryDB = std::map<std::string, FunctionSummaries>;

/// Layers of the call graph, callees first. Functions in one layer do not
/// call each other; externs are left out.
inline std::vector<std::vector<std::string>> bottom_up_schedule(const ValueFlowGraph& g) {
  std::map<std::string, int> level;
  std::map<std::string, int> state;
  std::function<int(const std::string&)> depth = [&](const std::string& f) -> int {
    if (state[f] == 2) return level[f];
    if (state[f] == 1) throw SchedulingError("recursive call cycle through '" + f + "'");
    state[f] = 1;
    int d = 0;
    auto it = g.call_graph().find(f);
    if (it != g.call_graph().end()) {
      for (const auto& c : it->second) d = std::max(d, depth(c) + 1);
    }
    state[f] = 2;
    level[f] = d;
    return d;
  };
  std::vector<std::vector<std::string>> batches;
  for (const auto& fn : g.functions()) {
    if (fn.is_extern) continue;
    auto d = static_cast<std::size_t>(depth(fn.name));
    if (batches.size() <= d) batches.resize(d + 1);
  }
  for (const auto& fn : g.functions()) {
    if (!fn.is_extern) batches[static_cast<std::size_t>(level[fn.name])].push_back(fn.name);
  }
  return batches;
}

namespace detail {

/// Same-level walks inside one function.
class SameLevel {
 public:
  SameLevel(const ValueFlowGraph& g, const SummaryDB& db, const std::string& fn)
      : g_(g), db_(db), fn_(fn) {}

  /// Calls `at(sequence)` for every same-level path from `start`,
  /// including the zero-length one.
  template <class F>
  void walk(VertexIndex start, F&& at) {
    seq_.assign(1, start);
    step(at);
  }

  /// Callee summaries entered from `arg` (a call argument vertex),
  /// together with the call site.
  template <class F>
  void calls_from(VertexIndex arg, F&& each) const {
    const Vertex& v = g_.vertex(arg);
    for (const auto& r : v.roles) {
      if (!r.is_call_arg()) continue;
      const FunctionInfo* callee = g_.function(r.callee);
      if (!callee || callee->is_extern) continue;
      auto it = db_.find(r.callee);
      if (it == db_.end()) {
        throw SchedulingError("'" + r.callee + "' is not summarized before '" + fn_ + "'");
      }
      const CallSite* site = find_site(v.function, r.site);
      each(it->second, r.index, *site);
    }
  }

  const CallSite* find_site(const std::string& caller, const std::string& label) const {
    for (const auto& cs : g_.call_sites()) {
      if (cs.caller == caller && cs.label == label) return &cs;
    }
    throw GraphError("no call site '" + label + "' in '" + caller + "'");
  }

  static bool starts_at_param(const ValueFlowGraph& g, const Path& p, int index) {
    for (const auto& r : g.vertex(p.front()).roles) {
      if (r.kind == Stmt::formal_param && r.index == index) return true;
    }
    return false;
  }

 private:
  template <class F>
  void step(F& at) {
    at(seq_);
    VertexIndex u = seq_.back();
    for (EdgeIndex e : g_.out_edges(u)) {
      const Edge& edge = g_.edge(e);
      if (edge.kind != EdgeKind::intra) continue;
      seq_.push_back(edge.dst);
      step(at);
      seq_.pop_back();
    }
    calls_from(u, [&](const FunctionSummaries& callee, int k, const CallSite& site) {
      for (const auto& t : callee.transfer) {
        if (!starts_at_param(g_, t.path, k)) continue;
        for (VertexIndex r : site.ret_vertices) {
          std::size_t mark = seq_.size();
          seq_.insert(seq_.end(), t.path.vertices.begin(), t.path.vertices.end());
          seq_.push_back(r);
          step(at);
          seq_.resize(mark);
        }
      }
    });
  }

  const ValueFlowGraph& g_;
  const SummaryDB& db_;
  std::string fn_;
  std::vector<VertexIndex> seq_;
};

inline std::vector<VertexIndex> joined(const std::vector<VertexIndex>& a,
                                       const std::vector<VertexIndex>& b) {
  std::vector<VertexIndex> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace detail

inline FunctionSummaries build_summaries(const ValueFlowGraph& g, const std::string& f,
                                         const SummaryDB& db, const std::vector<PropertySpec>& specs) {
  const FunctionInfo* fn = g.function(f);
  if (!fn) throw std::invalid_argument("unknown function '" + f + "'");
  FunctionSummaries out;
  if (fn->is_extern) return out;
  MatchTable table(g, specs);
  const int width = static_cast<int>(specs.size());
  const PropertySet ones = PropertySet::all(width);
  detail::SameLevel sl(g, db, f);

  for (VertexIndex v : fn->vertices) {
    if (!g.vertex(v).is_formal_param()) continue;
    sl.walk(v, [&](const std::vector<VertexIndex>& seq) {
      VertexIndex tail = seq.back();
      if (g.vertex(tail).is_formal_ret()) {
        out.transfer.push_back({SummaryKind::transfer, make_path(g, seq), ones, f});
      }
      if (auto m = table.sink_mask(tail)) {
        out.input.push_back({SummaryKind::input, make_path(g, seq), PropertySet(width, m), f});
      }
      sl.calls_from(tail, [&](const FunctionSummaries& callee, int k, const CallSite&) {
        for (const auto& in : callee.input) {
          if (!detail::SameLevel::starts_at_param(g, in.path, k)) continue;
          out.input.push_back({SummaryKind::input, make_path(g, detail::joined(seq, in.path.vertices)),
                               in.label, f});
        }
      });
    });
  }

  auto outputs_from = [&](VertexIndex start, const std::vector<VertexIndex>& prefix, PropertySet label) {
    sl.walk(start, [&](const std::vector<VertexIndex>& seq) {
      if (g.vertex(seq.back()).is_formal_ret()) {
        out.output.push_back({SummaryKind::output, make_path(g, detail::joined(prefix, seq)), label, f});
      }
    });
  };
  for (VertexIndex v : fn->vertices) {
    if (auto m = table.src_mask(v)) outputs_from(v, {}, PropertySet(width, m));
  }
  for (int s : fn->call_sites) {
    const CallSite& cs = g.call_site(s);
    const FunctionInfo* callee = g.function(cs.callee);
    if (callee->is_extern) continue;
    auto it = db.find(cs.callee);
    if (it == db.end()) throw SchedulingError("'" + cs.callee + "' is not summarized before '" + f + "'");
    for (const auto& o : it->second.output) {
      for (VertexIndex r : cs.ret_vertices) outputs_from(r, o.path.vertices, o.label);
    }
  }

  auto dedupe = [](std::vector<Summary>& list) {
    std::sort(list.begin(), list.end(), [](const Summary& a, const Summary& b) {
      return a.path != b.path ? a.path < b.path : a.label.bits() < b.label.bits();
    });
    list.erase(std::unique(list.begin(), list.end()), list.end());
  };
  dedupe(out.transfer);
  dedupe(out.input);
  dedupe(out.output);
  return out;
}

/// Summarizes every function bottom-up; functions of one layer run on up
/// to `threads` workers.
inline SummaryDB build_all_summaries(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs,
                                     int threads = 1) {
  SummaryDB db;
  for (const auto& batch : bottom_up_schedule(g)) {
    std::vector<FunctionSummaries> results(batch.size());
    std::vector<std::exception_ptr> errors(batch.size());
    auto work = [&](std::size_t i) {
      try {
        results[i] = build_summaries(g, batch[i], db, specs);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    if (threads <= 1 || batch.size() == 1) {
      for (std::size_t i = 0; i < batch.size(); ++i) work(i);
    } else {
      for (std::size_t start = 0; start < batch.size(); start += static_cast<std::size_t>(threads)) {
        std::vector<std::thread> pool;
        std::size_t stop = std::min(batch.size(), start + static_cast<std::size_t>(threads));
        for (std::size_t i = start; i < stop; ++i) pool.emplace_back(work, i);
        for (auto& t : pool) t.join();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t i = 0; i < batch.size(); ++i) db[batch[i]] = std::move(results[i]);
  }
  return db;
}

/// Complete candidate paths with their property labels: sources in a
/// function or callee outputs climbing into it, a same-level walk, then a
/// sink or a callee input.
inline std::vector<Candidate> stitch_candidates(const ValueFlowGraph& g, const SummaryDB& db,
                                                const std::vector<PropertySpec>& specs) {
  MatchTable table(g, specs);
  std::map<std::vector<VertexIndex>, std::uint64_t> found;
  for (const auto& fn : g.functions()) {
    if (fn.is_extern) continue;
    detail::SameLevel sl(g, db, fn.name);
    auto from = [&](VertexIndex start, const std::vector<VertexIndex>& prefix, std::uint64_t label) {
      sl.walk(start, [&](const std::vector<VertexIndex>& seq) {
        VertexIndex tail = seq.back();
        if (auto m = label & table.sink_mask(tail)) {
          found[detail::joined(prefix, seq)] |= m;
        }
        sl.calls_from(tail, [&](const FunctionSummaries& callee, int k, const CallSite&) {
          for (const auto& in : callee.input) {
            if (!detail::SameLevel::starts_at_param(g, in.path, k)) continue;
            if (auto m = label & in.label.bits()) {
              found[detail::joined(detail::joined(prefix, seq), in.path.vertices)] |= m;
            }
          }
        });
      });
    };
    for (VertexIndex v : fn.vertices) {
      if (auto m = table.src_mask(v)) from(v, {}, m);
    }
    for (int s : fn.call_sites) {
      const CallSite& cs = g.call_site(s);
      auto it = db.find(cs.callee);
      if (it == db.end()) continue;
      for (const auto& o : it->second.output) {
        for (VertexIndex r : cs.ret_vertices) from(r, o.path.vertices, o.label.bits());
      }
    }
  }
  std::vector<Candidate> out;
  out.reserve(found.size());
  for (auto& [seq, label] : found) out.push_back({make_path(g, seq), label});
  return out;
}

/// Stitched candidates split per property, each list in path order.
inline std::vector<std::vector<Path>> stitch(const ValueFlowGraph& g, const SummaryDB& db,
                                             const std::vector<PropertySpec>& specs) {
  std::vector<std::vector<Path>> out(specs.size());
  for (const auto& c : stitch_candidates(g, db, specs)) {
    for (std::size_t b = 0; b < specs.size(); ++b) {
      if ((c.label >> b) & 1U) out[b].push_back(c.path);
    }
  }
  for (auto& list : out) std::sort(list.begin(), list.end());
  return out;
}

// ---------------------------------------------------------------------------
// `.vfsum` dump: one summary per line, `FUNCTION KIND 0bLABEL v1 v2 ...`.

inline std::string dump_summaries(const ValueFlowGraph& g, const SummaryDB& db) {
  std::ostringstream out;
  for (const auto& fn : g.functions()) {
    auto it = db.find(fn.name);
    if (it == db.end()) continue;
    for (auto kind : {SummaryKind::transfer, SummaryKind::input, SummaryKind::output}) {
      for (const auto& s : it->second.of(kind)) {
        out << fn.name << " " << to_string(kind) << " " << s.label.to_string();
        for (auto v : s.path.vertices) out << " " << g.vertex(v).id;
        out << "\n";
      }
    }
  }
  return out.str();
}

inline SummaryDB load_summaries(const ValueFlowGraph& g, std::string_view text) {
  SummaryDB db;
  for (const auto& f : g.functions()) {
    if (!f.is_extern) db[f.name];
  }
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto toks = detail::tokenize(detail::strip_comment(text.substr(pos, end - pos)));
    pos = end + 1;
    if (toks.empty()) continue;
    if (toks.size() < 4) throw ParseError("expected FUNCTION KIND LABEL VERTEX...", line_no, toks[0].column);
    Summary s;
    s.function = toks[0].text;
    const FunctionInfo* fn = g.function(s.function);
    if (!fn || fn->is_extern) {
      throw ParseError("no function body named '" + s.function + "'", line_no, toks[0].column);
    }
    const std::string& kind = toks[1].text;
    if (kind == "transfer") {
      s.kind = SummaryKind::transfer;
    } else if (kind == "input") {
      s.kind = SummaryKind::input;
    } else if (kind == "output") {
      s.kind = SummaryKind::output;
    } else {
      throw ParseError("unknown summary kind '" + kind + "'", line_no, toks[1].column);
    }
    const std::string& lit = toks[2].text;
    if (lit.size() < 3 || lit.compare(0, 2, "0b") != 0 ||
        lit.find_first_not_of("01", 2) != std::string::npos || lit.size() - 2 > 64) {
      throw ParseError("bad label '" + lit + "'", line_no, toks[2].column);
    }
    s.label = PropertySet(static_cast<int>(lit.size() - 2), std::stoull(lit.substr(2), nullptr, 2));
    std::vector<VertexIndex> seq;
    for (std::size_t i = 3; i < toks.size(); ++i) {
      auto v = g.find(toks[i].text);
      if (!v) throw ParseError("unknown vertex '" + toks[i].text + "'", line_no, toks[i].column);
      seq.push_back(*v);
    }
    try {
      s.path = make_path(g, std::move(seq));
    } catch (const ConcatError& e) {
      throw ParseError(e.what(), line_no, toks[3].column);
    }
    db[s.function].of(s.kind).push_back(std::move(s));
  }
  return db;
}

}  // namespace vflow
