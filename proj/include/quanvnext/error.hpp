#pragma once

#include <stdexcept>
#include <string>

namespace quanvnext {

// Invalid argument values or shapes passed to an operation.
using ArgumentError = std::invalid_argument;

// A configuration violates a structural invariant (divisibility, split policy, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed on-disk input. The message names the offending field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was invoked on an object in the wrong state (e.g. a backward
// pass without its forward context).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace quanvnext
