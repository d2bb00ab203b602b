#pragma once

// Line-based `.vfg` reader and writer.
//
//   extern malloc(1)
//   func main(0) {
//     v p p call malloc ret cond x1 > 0
//     v a a assign
//     e p -> a guard x1 > 0
//     loop {
//       v q q assign
//       e q -> a
//     }
//   }

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vflow/condition.hpp"
#include "vflow/error.hpp"
#include "vflow/graph.hpp"

namespace vflow {

namespace detail {

struct Token {
  std::string text;
  std::size_t column = 0;  // 1-based
};

/// Strips a `#` comment that starts the line or follows whitespace.
inline std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
      return line.substr(0, i);
    }
  }
  return line;
}

inline std::vector<Token> tokenize(std::string_view line, std::size_t from = 0) {
  std::vector<Token> out;
  std::size_t i = from;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return out;
}

inline std::optional<int> to_small_int(const std::string& s) {
  if (s.empty() || s.size() > 6) return std::nullopt;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return std::stoi(s);
}

/// Position of the keyword token `kw`; the remainder of the line after it
/// is an atom list rather than whitespace-separated tokens.
inline std::optional<std::size_t> keyword_offset(std::string_view line, std::string_view kw) {
  auto toks = tokenize(line);
  for (const auto& t : toks) {
    if (t.text == kw) return t.column - 1;
  }
  return std::nullopt;
}

class VfgParser {
 public:
  explicit VfgParser(std::string_view text) : text_(text) {}

  ValueFlowGraph parse() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no_;
      line(strip_comment(text_.substr(pos, end - pos)));
      if (end == text_.size()) break;
      pos = end + 1;
    }
    if (fn_) fail("unterminated function '" + fn_->name + "'", 1);
    try {
      return builder_.build();
    } catch (const AtomSyntaxError& e) {
      throw ParseError(e.what(), line_no_, e.column());
    }
  }

 private:
  struct DeclaredVertex {
    Vertex vertex;
    int loop = -1;   // loop index within the function, -1 outside loops
    int order = 0;   // declaration order within the loop
    std::size_t line = 0;
  };
  struct DeclaredEdge {
    std::string src;
    std::string dst;
    Condition guard;
    std::size_t line = 0;
    std::size_t column = 0;
  };
  struct OpenFunction {
    std::string name;
    std::vector<DeclaredVertex> vertices;
    std::vector<DeclaredEdge> edges;
    int loops = 0;
  };

  [[noreturn]] void fail(const std::string& what, std::size_t column) const {
    throw ParseError(what, line_no_, column);
  }

  void line(std::string_view l) {
    auto toks = tokenize(l);
    if (toks.empty()) return;
    const std::string& head = toks[0].text;
    if (head == "}") {
      if (toks.size() != 1) fail("unexpected text after '}'", toks[1].column);
      close_block(toks[0].column);
      return;
    }
    if (head == "func" || head == "extern") {
      if (fn_) fail("'" + head + "' inside a function body", toks[0].column);
      declaration(l, toks);
      return;
    }
    if (!fn_) fail("expected 'func' or 'extern', got '" + head + "'", toks[0].column);
    if (head == "loop") {
      if (in_loop_) fail("nested loop blocks are not supported", toks[0].column);
      if (toks.size() != 2 || toks[1].text != "{") fail("expected 'loop {'", toks[0].column);
      in_loop_ = true;
      loop_order_ = 0;
      return;
    }
    if (head == "v") {
      vertex_line(l, toks);
      return;
    }
    if (head == "e") {
      edge_line(l, toks);
      return;
    }
    fail("unknown directive '" + head + "'", toks[0].column);
  }

  void declaration(std::string_view l, const std::vector<Token>& toks) {
    bool is_extern = toks[0].text == "extern";
    // Rejoin the signature so `f (2)` and `f(2)` both work.
    std::size_t sig_start = toks.size() > 1 ? toks[1].column - 1 : l.size();
    std::string_view rest = l.substr(sig_start);
    auto open = rest.find('(');
    auto close = rest.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      fail("expected NAME(ARITY)", sig_start + 1);
    }
    std::string name(rest.substr(0, open));
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    if (name.empty()) fail("missing function name", sig_start + 1);
    std::string arity_text(rest.substr(open + 1, close - open - 1));
    auto arity = to_small_int(arity_text);
    if (!arity) fail("bad arity '" + arity_text + "'", sig_start + open + 2);
    auto tail = tokenize(rest.substr(close + 1));
    std::string tail_text;
    for (auto& t : tail) tail_text += t.text;
    try {
      builder_.declare_function(name, *arity, is_extern);
    } catch (const GraphError& e) {
      fail(e.what(), sig_start + 1);
    }
    if (is_extern) {
      if (!tail_text.empty()) fail("unexpected text after extern declaration", sig_start + close + 2);
      return;
    }
    if (tail_text == "{") {
      fn_ = OpenFunction{name, {}, {}, 0};
    } else if (tail_text == "{}") {
      fn_ = OpenFunction{name, {}, {}, 0};
      finish_function();
    } else {
      fail("expected '{' after function signature", sig_start + close + 2);
    }
  }

  void close_block(std::size_t column) {
    if (in_loop_) {
      in_loop_ = false;
      ++fn_->loops;
      return;
    }
    if (!fn_) fail("unmatched '}'", column);
    finish_function();
  }

  StatementKind kind_at(const std::vector<Token>& t, std::size_t& i, std::size_t stop) {
    auto need = [&](const char* what) -> const Token& {
      if (i >= stop) fail(std::string("expected ") + what, t[stop - 1].column);
      return t[i++];
    };
    const Token& k = need("statement kind");
    StatementKind sk;
    if (k.text == "param") {
      const Token& n = need("parameter index");
      auto idx = to_small_int(n.text);
      if (!idx) fail("bad parameter index '" + n.text + "'", n.column);
      sk = StatementKind::formal_param(*idx);
    } else if (k.text == "ret") {
      sk = StatementKind::formal_ret();
    } else if (k.text == "call") {
      const Token& callee = need("callee name");
      const Token& pos = need("'ret' or 'arg K'");
      if (pos.text == "ret") {
        sk = StatementKind::call_ret(callee.text);
      } else if (pos.text == "arg") {
        const Token& n = need("argument index");
        auto idx = to_small_int(n.text);
        if (!idx) fail("bad argument index '" + n.text + "'", n.column);
        sk = StatementKind::call_arg(callee.text, *idx);
      } else {
        fail("expected 'ret' or 'arg', got '" + pos.text + "'", pos.column);
      }
      if (i < stop && t[i].text == "site") {
        ++i;
        sk.site = need("site label").text;
      }
    } else if (k.text == "load") {
      sk = StatementKind::load();
      if (i < stop && (t[i].text == "operand" || t[i].text == "result")) {
        sk.slot = t[i++].text == "result" ? Slot::result : Slot::operand;
      }
    } else if (k.text == "store") {
      sk = StatementKind::store();
      if (i < stop && (t[i].text == "address" || t[i].text == "stored")) {
        sk.slot = t[i++].text == "stored" ? Slot::stored : Slot::address;
      }
    } else if (k.text == "assign") {
      sk = StatementKind::assign();
    } else if (k.text == "global") {
      sk = StatementKind::global();
    } else if (k.text == "other") {
      sk = StatementKind::other(need("tag").text);
    } else {
      fail("unknown statement kind '" + k.text + "'", k.column);
    }
    return sk;
  }

  Condition atoms_after(std::string_view l, std::size_t offset, std::size_t kw_len) {
    std::size_t start = offset + kw_len;
    try {
      return parse_atom_list(l.substr(start), start + 1);
    } catch (const AtomSyntaxError& e) {
      fail(e.what(), e.column());
    }
  }

  void vertex_line(std::string_view l, const std::vector<Token>& all) {
    auto cond_at = keyword_offset(l, "cond");
    std::vector<Token> toks;
    for (const auto& t : all) {
      if (cond_at && t.column - 1 >= *cond_at) break;
      toks.push_back(t);
    }
    if (toks.size() < 4) fail("expected 'v ID VAR KIND'", all.back().column);
    Vertex v;
    v.id = toks[1].text;
    v.variable = toks[2].text;
    v.function = fn_->name;
    std::size_t i = 3;
    v.roles.push_back(kind_at(toks, i, toks.size()));
    while (i < toks.size()) {
      if (toks[i].text != "also") fail("unexpected '" + toks[i].text + "'", toks[i].column);
      ++i;
      v.roles.push_back(kind_at(toks, i, toks.size()));
    }
    if (cond_at) v.occurrence = atoms_after(l, *cond_at, 4);
    for (const auto& d : fn_->vertices) {
      if (d.vertex.id == v.id) fail("duplicate vertex id '" + v.id + "'", toks[1].column);
    }
    fn_->vertices.push_back({std::move(v), in_loop_ ? fn_->loops : -1, loop_order_++, line_no_});
  }

  void edge_line(std::string_view l, const std::vector<Token>& all) {
    auto guard_at = keyword_offset(l, "guard");
    std::vector<Token> toks;
    for (const auto& t : all) {
      if (guard_at && t.column - 1 >= *guard_at) break;
      toks.push_back(t);
    }
    if (toks.size() != 4 || toks[2].text != "->") {
      fail("expected 'e SRC -> DST'", toks.front().column);
    }
    Condition guard = guard_at ? atoms_after(l, *guard_at, 5) : Condition::top();
    fn_->edges.push_back({toks[1].text, toks[3].text, std::move(guard), line_no_, toks[1].column});
  }

  /// Emits the function's vertices and edges, unrolling each loop twice.
  void finish_function() {
    OpenFunction f = std::move(*fn_);
    fn_.reset();
    std::map<std::string, const DeclaredVertex*> by_id;
    for (const auto& d : f.vertices) by_id[d.vertex.id] = &d;

    auto copy_id = [](const std::string& id, int k) { return id + "#" + std::to_string(k); };
    for (const auto& d : f.vertices) {
      if (d.loop < 0) {
        builder_.add_vertex(d.vertex);
        continue;
      }
      for (int k = 1; k <= 2; ++k) {
        Vertex c = d.vertex;
        c.id = copy_id(d.vertex.id, k);
        for (auto& r : c.roles) {
          if (r.kind == Stmt::call) r.site = copy_id(r.site, k);
        }
        builder_.add_vertex(std::move(c));
      }
    }

    for (const auto& e : f.edges) {
      auto s = by_id.find(e.src);
      auto t = by_id.find(e.dst);
      if (s == by_id.end()) {
        throw ParseError("edge source '" + e.src + "' is not a vertex of '" + f.name + "'",
                         e.line, e.column);
      }
      if (t == by_id.end()) {
        throw ParseError("edge target '" + e.dst + "' is not a vertex of '" + f.name + "'",
                         e.line, e.column);
      }
      const DeclaredVertex& src = *s->second;
      const DeclaredVertex& dst = *t->second;
      if (src.loop < 0 && dst.loop < 0) {
        builder_.add_edge(e.src, e.dst, e.guard);
      } else if (src.loop >= 0 && src.loop == dst.loop) {
        if (dst.order <= src.order) {
          builder_.add_edge(copy_id(e.src, 1), copy_id(e.dst, 2), e.guard);
        } else {
          for (int k = 1; k <= 2; ++k) builder_.add_edge(copy_id(e.src, k), copy_id(e.dst, k), e.guard);
        }
      } else {
        std::string dst_id = dst.loop >= 0 ? copy_id(e.dst, 1) : e.dst;
        if (src.loop >= 0) {
          for (int k = 1; k <= 2; ++k) builder_.add_edge(copy_id(e.src, k), dst_id, e.guard);
        } else {
          builder_.add_edge(e.src, dst_id, e.guard);
        }
      }
    }
  }

  std::string_view text_;
  std::size_t line_no_ = 0;
  GraphBuilder builder_;
  std::optional<OpenFunction> fn_;
  bool in_loop_ = false;
  int loop_order_ = 0;
};

}  // namespace detail

/// Parses `.vfg` text. Syntax errors raise ParseError; well-formed text
/// describing an invalid graph raises GraphError.
inline ValueFlowGraph parse_program(std::string_view text) {
  return detail::VfgParser(text).parse();
}

/// Prints the flattened graph (loops already unrolled); parsing the result
/// yields an equal graph.
inline std::string print_program(const ValueFlowGraph& g) {
  std::ostringstream out;
  for (const auto& fn : g.functions()) {
    if (fn.is_extern) {
      out << "extern " << fn.name << "(" << fn.arity << ")\n";
      continue;
    }
    out << "func " << fn.name << "(" << fn.arity << ") {\n";
    for (VertexIndex v : fn.vertices) {
      const Vertex& vx = g.vertex(v);
      out << "  v " << vx.id << " " << vx.variable << " ";
      for (std::size_t i = 0; i < vx.roles.size(); ++i) {
        if (i) out << " also ";
        out << vx.roles[i].to_string();
      }
      if (!vx.occurrence.is_true()) out << " cond " << vx.occurrence.to_atom_list();
      out << "\n";
    }
    for (VertexIndex v : fn.vertices) {
      for (EdgeIndex e : g.out_edges(v)) {
        const Edge& edge = g.edge(e);
        if (edge.kind != EdgeKind::intra) continue;
        out << "  e " << g.vertex(edge.src).id << " -> " << g.vertex(edge.dst).id;
        if (!edge.guard.is_true()) out << " guard " << edge.guard.to_atom_list();
        out << "\n";
      }
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace vflow
