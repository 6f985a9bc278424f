#pragma once

#include <stdexcept>
#include <string>

namespace qbat {

// Precondition violations are reported with std::invalid_argument; the types
// below mark failures callers are expected to tell apart.

class NegativeCouplingError : public std::invalid_argument {
 public:
  explicit NegativeCouplingError(double g);
  double coupling() const { return g_; }

 private:
  double g_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::size_t dim)
      : std::runtime_error(what), dim_(dim) {}
  std::size_t dimension() const { return dim_; }

 private:
  std::size_t dim_;
};

class TruncationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbat
