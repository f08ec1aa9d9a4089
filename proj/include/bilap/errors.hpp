#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bilap {

/// Invalid input: a violated precondition or a malformed configuration value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A query point or ball falls outside the discretized half ball.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Iterative method failed. Carries the last iterate (free + Dirichlet node values)
/// and the gradient sup-norm at that iterate so callers can inspect it.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> iterate, double gradient_norm)
      : std::runtime_error(what), iterate_(std::move(iterate)), gradient_norm_(gradient_norm) {}

  const std::vector<double>& iterate() const noexcept { return iterate_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  std::vector<double> iterate_;
  double gradient_norm_;
};

/// A diagnostic could not produce a meaningful number (no blow-up, zero fit, ...).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bilap
