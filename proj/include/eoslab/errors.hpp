#pragma once

#include <stdexcept>
#include <string>

namespace eoslab {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A band scheme that accepts no heralding events (zero conditional mass).
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The truncated moment expansion produced a significantly negative probability.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or root finding failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (unknown key, missing field, bad value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eoslab
