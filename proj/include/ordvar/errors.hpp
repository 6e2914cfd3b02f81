#pragma once

#include <stdexcept>
#include <string>

namespace ordvar {

/// Argument outside the mathematical domain of an operation (nonpositive
/// variance, undefined inverse moment, degenerate statistic, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shapes that do not fit together, e.g. a mean vector whose length differs
/// from the configured dimension.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative numerical routine stopped before reaching its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

}  // namespace ordvar
