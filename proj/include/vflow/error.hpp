#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vflow {

/// Malformed `.vfg` / `.prop` text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed text describing an invalid program (unknown callee, arity
/// mismatch, duplicate ids, cyclic value flow, ...).
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchedulingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency check failed (e.g. an unsound store entry).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace vflow
