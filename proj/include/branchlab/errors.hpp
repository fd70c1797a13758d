#pragma once

#include <stdexcept>
#include <string>

namespace branchlab {

/// Input violates a documented invariant (normalization, totality, ranges).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation does not support the shape of its input (e.g. component count).
class UnsupportedShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quantity the operation needs is mathematically undefined.
class UndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace branchlab
