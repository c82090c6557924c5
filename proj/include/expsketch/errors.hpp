#pragma once

#include <stdexcept>
#include <string>

namespace expsketch {

/// Invalid argument: out-of-range index, dimension mismatch, bad parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive computation would exceed its configured work budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A guarantee bound is not defined for the given parameters (e.g. epsilon >= 1/4).
class BoundUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace expsketch
