#pragma once

#include <stdexcept>
#include <string>

namespace mshj {

/// Malformed or inconsistent caller input (dimension mismatch, bad schema values).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An iterative solve stopped at max_iter; carries the last residual seen.
struct NonConvergence : std::runtime_error {
  NonConvergence(const std::string& msg, double residual, int iterations)
      : std::runtime_error(msg), last_residual(residual), iterations(iterations) {}
  double last_residual;
  int iterations;
};

/// An argument left the numerical Hamiltonian's certified momentum box.
struct OutOfValidity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An enumeration exceeded its configured work budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mshj
