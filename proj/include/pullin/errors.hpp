#pragma once

#include <stdexcept>
#include <string>

namespace pullin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or physically invalid user input (config files, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an input it does not support (e.g. identification on a
/// cantilever).
class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

/// Identification target outside the V_PI range spanned by the search bracket.
class RangeError : public InputError {
 public:
  using InputError::InputError;
};

/// Constrained stiffness singular or indefinite: the boundary conditions do not
/// remove the rigid-body modes.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Linear-solve breakdown or non-finite arithmetic where none is expected.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Local gap closed at a quadrature point.
class PenetrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pullin
