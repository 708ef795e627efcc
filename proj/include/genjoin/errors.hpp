#pragma once

#include <stdexcept>
#include <string>

namespace genjoin {

/// Raised by text-format parsers; carries the 1-based line number of the
/// offending line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}

  int line() const { return line_; }

private:
  int line_;
};

/// A hint references a table pair that is not an edge of the query.
class InvalidHintError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A stored model does not match the schema (or dims) it is loaded against.
class IncompatibleModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace genjoin
