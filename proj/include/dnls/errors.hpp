#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

// Invalid argument, out-of-range index, mismatched shapes.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A physically meaningful parameter makes the requested construction impossible.
class ParameterError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Too much mass near the box boundary for the periodic box to stand in for the lattice.
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or a failed numerical certificate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fixed-point iteration failed to contract.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Malformed or unsupported file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration rejected by the schema.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

// File system failure; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dnls
