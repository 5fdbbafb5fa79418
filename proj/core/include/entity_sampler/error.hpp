#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entity_sampler {

// Bad parameters or configuration (missing column, out-of-range epsilon, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input data. Carries the 1-based data row when known (0 = none).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// A value is requested outside the domain where it is defined
// (relative error with zero reference, Goodman with m >= n, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A probability map does not cover the dataset or violates its invariants.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative or randomized procedure failed to produce a result
// (trial cap exceeded, EM collapse after all restarts, oracle exhaustion).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entity_sampler
