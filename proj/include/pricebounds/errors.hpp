#pragma once

#include <stdexcept>
#include <string>

namespace pricebounds {

/// Raised when a caller breaks a documented precondition (bad index,
/// dimension mismatch, non-finite input, out-of-range parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lower bound above upper bound in at least one coordinate.
class InfeasibleBox : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A guarded operation declined to run (e.g. exhaustive grid too large).
class GuardRefusal : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A trial whose metrics are undefined; the harness logs and excludes it.
class FlaggedTrial : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace pricebounds
