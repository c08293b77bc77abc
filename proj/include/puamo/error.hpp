#pragma once

#include <stdexcept>
#include <string>

namespace puamo {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result would under- or overflow double precision.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A numerical routine failed (non-convergence, singular factorization, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A 2x2 coin or transfer-matrix denominator vanished at a lattice cell.
class SingularCellError : public NumericError {
 public:
  SingularCellError(const std::string& what, long cell)
      : NumericError(what + " (cell " + std::to_string(cell) + ")"), cell_(cell) {}
  long cell() const noexcept { return cell_; }

 private:
  long cell_;
};

/// Spectrum violates a structural symmetry it is supposed to have.
class StructuralViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace puamo
