#pragma once

#include <stdexcept>
#include <string>

namespace renyi {

// Truncated log-determinant cannot be trusted (spectral radius >= 1 or a
// failed residual check).
class NonConvergent : public std::runtime_error {
 public:
  explicit NonConvergent(const std::string& what) : std::runtime_error(what) {}
};

class QuadratureNotConverged : public std::runtime_error {
 public:
  explicit QuadratureNotConverged(const std::string& what)
      : std::runtime_error(what) {}
};

class InsufficientStatistics : public std::runtime_error {
 public:
  explicit InsufficientStatistics(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace renyi
