#pragma once

// Boolean conditions over bounded-integer linear atoms.
//
// An atom has one of three shapes:
//
//   x OP c        x OP y        x + y OP c
//
// with OP one of < <= == != >= >. Conditions are immutable trees of atoms
// joined by and/or/not; nodes are shared, so copying a Condition is cheap.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vflow {

enum class CmpOp { lt, le, eq, ne, ge, gt };

inline const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
    case CmpOp::ge: return ">=";
    case CmpOp::gt: return ">";
  }
  return "?";
}

inline CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return CmpOp::ge;
    case CmpOp::le: return CmpOp::gt;
    case CmpOp::eq: return CmpOp::ne;
    case CmpOp::ne: return CmpOp::eq;
    case CmpOp::ge: return CmpOp::lt;
    case CmpOp::gt: return CmpOp::le;
  }
  return op;
}

inline bool compare(std::int64_t lhs, CmpOp op, std::int64_t rhs) {
  switch (op) {
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::le: return lhs <= rhs;
    case CmpOp::eq: return lhs == rhs;
    case CmpOp::ne: return lhs != rhs;
    case CmpOp::ge: return lhs >= rhs;
    case CmpOp::gt: return lhs > rhs;
  }
  return false;
}

/// Thrown by the atom parser; `column` is 1-based within the parsed text.
class AtomSyntaxError : public std::runtime_error {
 public:
  AtomSyntaxError(const std::string& what, std::size_t column)
      : std::runtime_error(what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

struct Atom {
  enum class Form { var_const, var_var, sum_const };

  Form form = Form::var_const;
  std::string lhs;
  std::string rhs;  // var_var: right-hand variable; sum_const: second addend
  CmpOp op = CmpOp::eq;
  std::int64_t constant = 0;

  static Atom var_const(std::string x, CmpOp op, std::int64_t c) {
    return Atom{Form::var_const, std::move(x), {}, op, c};
  }
  static Atom var_var(std::string x, CmpOp op, std::string y) {
    return Atom{Form::var_var, std::move(x), std::move(y), op, 0};
  }
  static Atom sum_const(std::string x, std::string y, CmpOp op, std::int64_t c) {
    return Atom{Form::sum_const, std::move(x), std::move(y), op, c};
  }

  Atom negated() const {
    Atom a = *this;
    a.op = negate(op);
    return a;
  }

  std::vector<std::string> variables() const {
    if (form == Form::var_const || lhs == rhs) return {lhs};
    return {lhs, rhs};
  }

  template <typename Lookup>
  bool evaluate(Lookup&& value_of) const {
    std::int64_t left = value_of(lhs);
    if (form == Form::sum_const) left += value_of(rhs);
    std::int64_t right = form == Form::var_var ? value_of(rhs) : constant;
    return compare(left, op, right);
  }

  Atom renamed(const std::string& from, const std::string& to) const {
    Atom a = *this;
    if (a.lhs == from) a.lhs = to;
    if (a.form != Form::var_const && a.rhs == from) a.rhs = to;
    return a;
  }

  std::string to_string() const {
    switch (form) {
      case Form::var_const:
        return lhs + " " + vflow::to_string(op) + " " + std::to_string(constant);
      case Form::var_var:
        return lhs + " " + vflow::to_string(op) + " " + rhs;
      case Form::sum_const:
        return lhs + " + " + rhs + " " + vflow::to_string(op) + " " +
               std::to_string(constant);
    }
    return {};
  }

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

class Condition {
 public:
  enum class Kind { always, never, atom, conj, disj, neg };

  Condition() : node_(true_node()) {}

  static Condition top() { return Condition(true_node()); }
  static Condition bottom() { return Condition(false_node()); }

  static Condition of(Atom a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::atom;
    n->atom = std::move(a);
    return Condition(std::move(n));
  }

  static Condition conj(const std::vector<Condition>& parts) {
    std::vector<Condition> kept;
    for (const auto& p : parts) {
      if (p.is_false()) return bottom();
      if (p.is_true()) continue;
      if (p.kind() == Kind::conj) {
        kept.insert(kept.end(), p.children().begin(), p.children().end());
      } else {
        kept.push_back(p);
      }
    }
    if (kept.empty()) return top();
    if (kept.size() == 1) return kept.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::conj;
    n->children = std::move(kept);
    return Condition(std::move(n));
  }

  static Condition disj(const std::vector<Condition>& parts) {
    std::vector<Condition> kept;
    for (const auto& p : parts) {
      if (p.is_true()) return top();
      if (p.is_false()) continue;
      if (p.kind() == Kind::disj) {
        kept.insert(kept.end(), p.children().begin(), p.children().end());
      } else {
        kept.push_back(p);
      }
    }
    if (kept.empty()) return bottom();
    if (kept.size() == 1) return kept.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::disj;
    n->children = std::move(kept);
    return Condition(std::move(n));
  }

  static Condition negation(const Condition& c) {
    if (c.is_true()) return bottom();
    if (c.is_false()) return top();
    if (c.kind() == Kind::neg) return c.children().front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::neg;
    n->children = {c};
    return Condition(std::move(n));
  }

  friend Condition operator&&(const Condition& a, const Condition& b) {
    return conj({a, b});
  }
  friend Condition operator||(const Condition& a, const Condition& b) {
    return disj({a, b});
  }
  friend Condition operator!(const Condition& a) { return negation(a); }

  Kind kind() const { return node_->kind; }
  bool is_true() const { return node_->kind == Kind::always; }
  bool is_false() const { return node_->kind == Kind::never; }
  const Atom& atom() const { return node_->atom; }
  const std::vector<Condition>& children() const { return node_->children; }

  void collect_variables(std::set<std::string>& out) const {
    if (kind() == Kind::atom) {
      for (auto& v : atom().variables()) out.insert(v);
      return;
    }
    for (const auto& c : children()) c.collect_variables(out);
  }

  std::set<std::string> variables() const {
    std::set<std::string> out;
    collect_variables(out);
    return out;
  }

  Condition substitute(const std::string& from, const std::string& to) const {
    switch (kind()) {
      case Kind::always:
      case Kind::never:
        return *this;
      case Kind::atom:
        return of(atom().renamed(from, to));
      case Kind::neg:
        return negation(children().front().substitute(from, to));
      case Kind::conj:
      case Kind::disj: {
        std::vector<Condition> kids;
        kids.reserve(children().size());
        for (const auto& c : children()) kids.push_back(c.substitute(from, to));
        return kind() == Kind::conj ? conj(kids) : disj(kids);
      }
    }
    return *this;
  }

  /// Full evaluation; `value_of` must define every variable of the condition.
  template <typename Lookup>
  bool evaluate(Lookup&& value_of) const {
    switch (kind()) {
      case Kind::always: return true;
      case Kind::never: return false;
      case Kind::atom: return atom().evaluate(value_of);
      case Kind::neg: return !children().front().evaluate(value_of);
      case Kind::conj:
        return std::all_of(children().begin(), children().end(),
                           [&](const Condition& c) { return c.evaluate(value_of); });
      case Kind::disj:
        return std::any_of(children().begin(), children().end(),
                           [&](const Condition& c) { return c.evaluate(value_of); });
    }
    return false;
  }

  /// True when the condition is `true`, a single atom, or a conjunction of atoms.
  bool is_atom_conjunction() const {
    if (is_true() || kind() == Kind::atom) return true;
    if (kind() != Kind::conj) return false;
    return std::all_of(children().begin(), children().end(),
                       [](const Condition& c) { return c.kind() == Kind::atom; });
  }

  /// Atoms of an atom conjunction, in order. Empty for `true`.
  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    if (kind() == Kind::atom) {
      out.push_back(atom());
    } else if (kind() == Kind::conj) {
      for (const auto& c : children()) {
        if (c.kind() != Kind::atom) throw std::logic_error("not an atom conjunction");
        out.push_back(c.atom());
      }
    } else if (!is_true()) {
      throw std::logic_error("not an atom conjunction");
    }
    return out;
  }

  std::string to_string() const {
    switch (kind()) {
      case Kind::always: return "true";
      case Kind::never: return "false";
      case Kind::atom: return atom().to_string();
      case Kind::neg: return "!(" + children().front().to_string() + ")";
      case Kind::conj:
      case Kind::disj: {
        std::string sep = kind() == Kind::conj ? " && " : " || ";
        std::string out;
        for (std::size_t i = 0; i < children().size(); ++i) {
          if (i) out += sep;
          const auto& c = children()[i];
          bool wrap = c.kind() == Kind::conj || c.kind() == Kind::disj;
          out += wrap ? "(" + c.to_string() + ")" : c.to_string();
        }
        return out;
      }
    }
    return {};
  }

  /// `a; b; c` rendering used by the text formats. Requires an atom conjunction.
  std::string to_atom_list() const {
    std::string out;
    for (const auto& a : atoms()) {
      if (!out.empty()) out += "; ";
      out += a.to_string();
    }
    return out;
  }

  friend bool operator==(const Condition& a, const Condition& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    if (a.kind() == Kind::atom) return a.atom() == b.atom();
    return a.children() == b.children();
  }

 private:
  struct Node {
    Kind kind = Kind::always;
    Atom atom;
    std::vector<Condition> children;
  };

  explicit Condition(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> true_node() {
    static const auto n = [] {
      auto p = std::make_shared<Node>();
      p->kind = Kind::always;
      return std::shared_ptr<const Node>(p);
    }();
    return n;
  }
  static std::shared_ptr<const Node> false_node() {
    static const auto n = [] {
      auto p = std::make_shared<Node>();
      p->kind = Kind::never;
      return std::shared_ptr<const Node>(p);
    }();
    return n;
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Atom syntax: `VAR OP INT`, `VAR OP VAR`, `VAR + VAR OP INT`.

namespace detail {

struct AtomLexer {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t base_column = 1;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  std::size_t column() const { return base_column + pos; }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  [[noreturn]] void fail(const std::string& msg) { throw AtomSyntaxError(msg, column()); }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  bool peek_ident() {
    skip_ws();
    return pos < text.size() && ident_start(text[pos]);
  }

  std::string ident() {
    skip_ws();
    if (pos >= text.size() || !ident_start(text[pos])) fail("expected variable name");
    std::size_t start = pos;
    while (pos < text.size() && ident_char(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  }

  std::int64_t integer() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    std::size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits) {
      pos = start;
      fail("expected integer");
    }
    try {
      return std::stoll(std::string(text.substr(start, pos - start)));
    } catch (const std::out_of_range&) {
      pos = start;
      fail("integer out of range");
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  CmpOp op() {
    skip_ws();
    auto rest = text.substr(pos);
    static const std::pair<std::string_view, CmpOp> table[] = {
        {"<=", CmpOp::le}, {">=", CmpOp::ge}, {"==", CmpOp::eq}, {"!=", CmpOp::ne},
        {"<", CmpOp::lt},  {">", CmpOp::gt},
    };
    for (auto& [spelling, op] : table) {
      if (rest.substr(0, spelling.size()) == spelling) {
        pos += spelling.size();
        return op;
      }
    }
    fail("expected comparison operator");
  }
};

}  // namespace detail

inline Atom parse_atom(std::string_view text, std::size_t base_column = 1) {
  detail::AtomLexer lex{text, 0, base_column};
  std::string x = lex.ident();
  if (lex.accept('+')) {
    std::string y = lex.ident();
    CmpOp op = lex.op();
    std::int64_t c = lex.integer();
    if (!lex.at_end()) lex.fail("trailing input after atom");
    return Atom::sum_const(std::move(x), std::move(y), op, c);
  }
  CmpOp op = lex.op();
  if (lex.peek_ident()) {
    std::string y = lex.ident();
    if (!lex.at_end()) lex.fail("trailing input after atom");
    return Atom::var_var(std::move(x), op, std::move(y));
  }
  std::int64_t c = lex.integer();
  if (!lex.at_end()) lex.fail("trailing input after atom");
  return Atom::var_const(std::move(x), op, c);
}

/// Parses `atom; atom; ...` into their conjunction. `true` is accepted as
/// the empty list.
inline Condition parse_atom_list(std::string_view text, std::size_t base_column = 1) {
  std::vector<Condition> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    auto piece = text.substr(start, end - start);
    auto first = piece.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
      throw AtomSyntaxError("empty atom", base_column + start);
    }
    auto last = piece.find_last_not_of(" \t\r");
    auto trimmed = piece.substr(first, last - first + 1);
    if (trimmed == "true") {
      parts.push_back(Condition::top());
    } else {
      parts.push_back(Condition::of(parse_atom(trimmed, base_column + start + first)));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return Condition::conj(parts);
}

}  // namespace vflow
