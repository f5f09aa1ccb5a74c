#pragma once

#include <stdexcept>
#include <string>

namespace linext {

/// Thrown when a request exceeds a documented size guard (e.g. exact
/// enumeration limits). CLI maps this to exit code 3.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an input file or spec violates its documented invariants
/// (bad magic, nonzero padding bits, schema errors). CLI exit code 4.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linext
