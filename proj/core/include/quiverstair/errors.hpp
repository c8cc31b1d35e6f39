#pragma once

#include <stdexcept>
#include <string>

namespace quiverstair {

// Invalid arguments are reported as std::invalid_argument throughout.

/// A numerical routine failed to converge or produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank decisions taken at different points of an algorithm contradict each
/// other. Usually means the tolerance is badly placed for the input.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace quiverstair
