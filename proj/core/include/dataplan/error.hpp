#pragma once

#include <stdexcept>
#include <string>

namespace dataplan {

/// Argument outside the mathematical domain of an operation (t <= 0, sigma
/// outside the support, non-finite input).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a structural precondition (unsorted periods, size mismatch).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The three-point midpoint test rejected an objective that was supposed to
/// be concave on the search interval.
class ConcavityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid oracle was asked to search more configurations than it allows.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dataplan
