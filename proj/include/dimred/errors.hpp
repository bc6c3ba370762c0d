#pragma once

#include <stdexcept>
#include <string>

namespace dimred {

// Out-of-range parameter. The message names the offending field.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Discretization too coarse (grid extent, spectral tail, quadrature points).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dimension or memory cap was exceeded.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative method failed to reach its tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical blow-up (NaN) during time stepping.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dimred
