#pragma once

#include <stdexcept>

namespace bstar {

// Invalid arguments or malformed inputs: bad sizes, out-of-range indices,
// unparseable files.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerically impossible requests on otherwise well-formed inputs: singular
// reduced forms, unstable dynamics, degenerate regression designs.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bstar
