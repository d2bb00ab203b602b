#pragma once

// Property specifications `(src; sink; psc; agg)` and pattern matching
// against value-flow graph vertices.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
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
#include "vflow/vfg_format.hpp"

namespace vflow {

/// The symbol a psc template is written over.
inline constexpr const char* kPscSymbol = "v";

struct Pattern {
  enum class Kind { call, load, store, assign, global };
  Kind kind = Kind::assign;
  std::string callee;
  int index = -1;  // call: -1 ret, k >= 0 arg k, kAnyArg for `arg _`
  Slot slot = Slot::none;

  static constexpr int kAnyArg = -2;

  static Pattern call_ret(std::string callee) { return {Kind::call, std::move(callee), -1}; }
  static Pattern call_arg(std::string callee, int k) { return {Kind::call, std::move(callee), k}; }
  static Pattern call_any_arg(std::string callee) {
    return {Kind::call, std::move(callee), kAnyArg};
  }
  static Pattern load(Slot s) { return {Kind::load, {}, -1, s}; }
  static Pattern store(Slot s) { return {Kind::store, {}, -1, s}; }
  static Pattern assign() { return {Kind::assign, {}, -1, Slot::none}; }
  static Pattern global() { return {Kind::global, {}, -1, Slot::none}; }

  bool matches(const StatementKind& st) const {
    switch (kind) {
      case Kind::call:
        if (st.kind != Stmt::call || st.callee != callee) return false;
        if (index == kAnyArg) return st.index >= 0;
        return st.index == index;
      case Kind::load: return st.kind == Stmt::load && st.slot == slot;
      case Kind::store: return st.kind == Stmt::store && st.slot == slot;
      case Kind::assign: return st.kind == Stmt::assign;
      case Kind::global: return st.kind == Stmt::global;
    }
    return false;
  }

  bool matches(const Vertex& v) const {
    return std::any_of(v.roles.begin(), v.roles.end(),
                       [this](const StatementKind& r) { return matches(r); });
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::call:
        if (index == kAnyArg) return "call " + callee + " arg _";
        return "call " + callee + (index < 0 ? " ret" : " arg " + std::to_string(index));
      case Kind::load: return slot == Slot::result ? "load result" : "load operand";
      case Kind::store: return slot == Slot::stored ? "store stored" : "store address";
      case Kind::assign: return "assign";
      case Kind::global: return "global";
    }
    return {};
  }

  friend auto operator<=>(const Pattern&, const Pattern&) = default;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// A non-empty, duplicate-free list of pattern alternatives.
class PatternExpr {
 public:
  PatternExpr() = default;
  PatternExpr(std::initializer_list<Pattern> alts) {
    for (const auto& a : alts) add(a);
  }

  void add(const Pattern& p) {
    if (std::find(alts_.begin(), alts_.end(), p) == alts_.end()) alts_.push_back(p);
  }
  const std::vector<Pattern>& alternatives() const { return alts_; }
  bool empty() const { return alts_.empty(); }

  bool matches(const Vertex& v) const {
    return std::any_of(alts_.begin(), alts_.end(), [&](const Pattern& p) { return p.matches(v); });
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < alts_.size(); ++i) {
      if (i) out += ", ";
      out += alts_[i].to_string();
    }
    return out;
  }

  friend bool operator==(const PatternExpr&, const PatternExpr&) = default;

 private:
  std::vector<Pattern> alts_;
};

enum class Aggregate { never, never_sim, must };

inline const char* to_string(Aggregate a) {
  switch (a) {
    case Aggregate::never: return "never";
    case Aggregate::never_sim: return "never-sim";
    case Aggregate::must: return "must";
  }
  return "?";
}

struct PropertySpec {
  std::string name;
  PatternExpr src;
  PatternExpr sink;
  Condition psc = Condition::top();  // over the symbol `v`
  Aggregate agg = Aggregate::never;
  int bit = 0;

  friend bool operator==(const PropertySpec&, const PropertySpec&) = default;
};

/// Set of properties of one loaded batch, as a bit vector.
class PropertySet {
 public:
  static constexpr int kMaxWidth = 64;

  PropertySet() = default;
  explicit PropertySet(int width, std::uint64_t bits = 0) : width_(width), bits_(bits & mask(width)) {
    if (width < 0 || width > kMaxWidth) throw std::invalid_argument("property set width out of range");
  }
  static PropertySet all(int width) { return PropertySet(width, ~std::uint64_t{0}); }

  int width() const { return width_; }
  std::uint64_t bits() const { return bits_; }
  bool test(int bit) const { return bit >= 0 && bit < width_ && ((bits_ >> bit) & 1U); }
  bool empty() const { return bits_ == 0; }
  int count() const { return std::popcount(bits_); }

  PropertySet& set(int bit) {
    check(bit);
    bits_ |= std::uint64_t{1} << bit;
    return *this;
  }
  PropertySet& reset(int bit) {
    check(bit);
    bits_ &= ~(std::uint64_t{1} << bit);
    return *this;
  }

  friend PropertySet operator&(PropertySet a, const PropertySet& b) {
    a.bits_ &= b.bits_;
    return a;
  }
  friend PropertySet operator|(PropertySet a, const PropertySet& b) {
    a.bits_ |= b.bits_;
    return a;
  }
  PropertySet operator~() const { return PropertySet(width_, ~bits_); }
  friend bool operator==(const PropertySet&, const PropertySet&) = default;

  /// Binary literal, most significant property first (`0b110`).
  std::string to_string() const {
    std::string out = "0b";
    for (int i = width_ - 1; i >= 0; --i) out += test(i) ? '1' : '0';
    if (width_ == 0) out += '0';
    return out;
  }

  static std::uint64_t mask(int width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  }

 private:
  void check(int bit) const {
    if (bit < 0 || bit >= width_) throw std::out_of_range("property bit out of range");
  }

  int width_ = 0;
  std::uint64_t bits_ = 0;
};

// ---------------------------------------------------------------------------
// `.prop` parsing

namespace detail {

class PropParser {
 public:
  explicit PropParser(std::string_view text) : text_(text) {}

  std::vector<PropertySpec> parse() {
    std::vector<PropertySpec> out;
    std::set<std::string> names;
    skip_space();
    while (pos_ < text_.size()) {
      std::size_t kw_at = pos_;
      if (word() != "prop") fail("expected 'prop'", kw_at);
      std::size_t name_at = pos_;
      PropertySpec spec;
      spec.name = word();
      if (spec.name.empty()) fail("expected property name", name_at);
      if (!names.insert(spec.name).second) {
        fail("duplicate property name '" + spec.name + "'", name_at);
      }
      expect('{');
      std::size_t close = text_.find('}', pos_);
      if (close == std::string_view::npos) fail("unterminated property block", pos_);
      fields(spec, pos_, close);
      pos_ = close + 1;
      if (out.size() >= static_cast<std::size_t>(PropertySet::kMaxWidth)) {
        fail("too many properties", kw_at);
      }
      spec.bit = static_cast<int>(out.size());
      out.push_back(std::move(spec));
      skip_space();
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#' && (pos_ == 0 || std::isspace(static_cast<unsigned char>(text_[pos_ - 1])))) {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string word() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  static std::pair<std::size_t, std::size_t> trim(std::string_view s, std::size_t b, std::size_t e) {
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return {b, e};
  }

  void fields(PropertySpec& spec, std::size_t begin, std::size_t end) {
    std::set<std::string> seen;
    std::size_t start = begin;
    while (start < end) {
      std::size_t stop = text_.find(';', start);
      if (stop == std::string_view::npos || stop > end) stop = end;
      auto [b, e] = trim(text_, start, stop);
      if (b < e) field(spec, b, e, seen);
      start = stop + 1;
    }
    for (const char* required : {"src", "sink", "psc", "agg"}) {
      if (!seen.count(required)) {
        fail("property '" + spec.name + "' lacks '" + required + "'", end);
      }
    }
  }

  void field(PropertySpec& spec, std::size_t b, std::size_t e, std::set<std::string>& seen) {
    std::size_t colon = text_.find(':', b);
    if (colon == std::string_view::npos || colon >= e) fail("expected 'KEY: VALUE'", b);
    auto [kb, ke] = trim(text_, b, colon);
    std::string key(text_.substr(kb, ke - kb));
    auto [vb, ve] = trim(text_, colon + 1, e);
    if (!seen.insert(key).second) fail("duplicate field '" + key + "'", kb);
    if (vb >= ve) fail("empty value for '" + key + "'", colon + 1);
    std::string_view value = text_.substr(vb, ve - vb);
    if (key == "src" || key == "sink") {
      PatternExpr expr = pattern_list(vb, ve);
      (key == "src" ? spec.src : spec.sink) = std::move(expr);
    } else if (key == "psc") {
      if (value == "true") {
        spec.psc = Condition::top();
      } else {
        try {
          spec.psc = Condition::of(parse_atom(value, 1));
        } catch (const AtomSyntaxError& err) {
          fail(err.what(), vb + err.column() - 1);
        }
        for (const auto& v : spec.psc.variables()) {
          if (v != kPscSymbol) fail("psc may only mention the symbol 'v', found '" + v + "'", vb);
        }
      }
    } else if (key == "agg") {
      if (value == "never") {
        spec.agg = Aggregate::never;
      } else if (value == "never-sim") {
        spec.agg = Aggregate::never_sim;
      } else if (value == "must") {
        spec.agg = Aggregate::must;
      } else {
        fail("unknown agg keyword '" + std::string(value) + "'", vb);
      }
    } else {
      fail("unknown field '" + key + "'", kb);
    }
  }

  PatternExpr pattern_list(std::size_t b, std::size_t e) {
    PatternExpr out;
    std::size_t start = b;
    while (start <= e) {
      std::size_t stop = text_.find(',', start);
      if (stop == std::string_view::npos || stop > e) stop = e;
      auto [pb, pe] = trim(text_, start, stop);
      if (pb >= pe) fail("empty pattern", start);
      out.add(pattern(pb, pe));
      if (stop == e) break;
      start = stop + 1;
    }
    return out;
  }

  Pattern pattern(std::size_t b, std::size_t e) {
    std::vector<std::pair<std::string, std::size_t>> w;
    std::size_t i = b;
    while (i < e) {
      while (i < e && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
      std::size_t s = i;
      while (i < e && !std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
      if (s < i) w.emplace_back(std::string(text_.substr(s, i - s)), s);
    }
    auto bad = [&]() -> Pattern { fail("malformed pattern '" + std::string(text_.substr(b, e - b)) + "'", b); };
    const std::string& k = w[0].first;
    if (k == "call") {
      if (w.size() == 3 && w[2].first == "ret") return Pattern::call_ret(w[1].first);
      if (w.size() == 4 && w[2].first == "arg") {
        if (w[3].first == "_") return Pattern::call_any_arg(w[1].first);
        auto idx = detail::to_small_int(w[3].first);
        if (!idx) fail("bad argument index '" + w[3].first + "'", w[3].second);
        return Pattern::call_arg(w[1].first, *idx);
      }
      return bad();
    }
    if (k == "load" && w.size() == 2) {
      if (w[1].first == "result") return Pattern::load(Slot::result);
      if (w[1].first == "operand") return Pattern::load(Slot::operand);
    }
    if (k == "store" && w.size() == 2) {
      if (w[1].first == "stored") return Pattern::store(Slot::stored);
      if (w[1].first == "address") return Pattern::store(Slot::address);
    }
    if (k == "assign" && w.size() == 1) return Pattern::assign();
    if (k == "global" && w.size() == 1) return Pattern::global();
    return bad();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<PropertySpec> parse_specs(std::string_view text) {
  return detail::PropParser(text).parse();
}

inline std::string print_spec(const PropertySpec& s) {
  return "prop " + s.name + " { src: " + s.src.to_string() + "; sink: " + s.sink.to_string() +
         "; psc: " + s.psc.to_string() + "; agg: " + to_string(s.agg) + " }";
}

inline std::string print_specs(const std::vector<PropertySpec>& specs) {
  std::string out;
  for (const auto& s : specs) out += print_spec(s) + "\n";
  return out;
}

/// Re-numbers bits to list positions, e.g. after reordering or filtering.
inline std::vector<PropertySpec> renumber(std::vector<PropertySpec> specs) {
  for (std::size_t i = 0; i < specs.size(); ++i) specs[i].bit = static_cast<int>(i);
  return specs;
}

// ---------------------------------------------------------------------------
// Matching

inline std::vector<VertexIndex> match_vertices(const PatternExpr& p, const ValueFlowGraph& g) {
  std::vector<VertexIndex> out;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (p.matches(g.vertex(v))) out.push_back(v);
  }
  return out;
}

inline Condition instantiate_psc(const PropertySpec& spec, const Vertex& source) {
  if (spec.psc.is_true()) return spec.psc;
  return spec.psc.substitute(kPscSymbol, source.variable);
}

/// Source and sink sets of every property, plus per-vertex bit masks.
class MatchTable {
 public:
  MatchTable() = default;
  MatchTable(const ValueFlowGraph& g, const std::vector<PropertySpec>& specs)
      : width_(static_cast<int>(specs.size())),
        src_mask_(g.vertex_count(), 0),
        sink_mask_(g.vertex_count(), 0) {
    if (width_ > PropertySet::kMaxWidth) throw std::invalid_argument("more than 64 properties");
    for (const auto& s : specs) {
      if (s.bit < 0 || s.bit >= width_) throw std::invalid_argument("property bit out of range");
    }
    sources_.resize(specs.size());
    sinks_.resize(specs.size());
    for (const auto& s : specs) {
      sources_[s.bit] = match_vertices(s.src, g);
      sinks_[s.bit] = match_vertices(s.sink, g);
      for (auto v : sources_[s.bit]) src_mask_[v] |= std::uint64_t{1} << s.bit;
      for (auto v : sinks_[s.bit]) sink_mask_[v] |= std::uint64_t{1} << s.bit;
    }
  }

  int width() const { return width_; }
  const std::vector<VertexIndex>& sources(int bit) const { return sources_.at(bit); }
  const std::vector<VertexIndex>& sinks(int bit) const { return sinks_.at(bit); }
  std::uint64_t src_mask(VertexIndex v) const { return src_mask_.at(v); }
  std::uint64_t sink_mask(VertexIndex v) const { return sink_mask_.at(v); }
  bool is_source(VertexIndex v, int bit) const { return (src_mask_.at(v) >> bit) & 1U; }
  bool is_sink(VertexIndex v, int bit) const { return (sink_mask_.at(v) >> bit) & 1U; }

 private:
  int width_ = 0;
  std::vector<std::vector<VertexIndex>> sources_;
  std::vector<std::vector<VertexIndex>> sinks_;
  std::vector<std::uint64_t> src_mask_;
  std::vector<std::uint64_t> sink_mask_;
};

}  // namespace vflow
