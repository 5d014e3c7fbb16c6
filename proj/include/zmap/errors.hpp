#pragma once

#include <stdexcept>
#include <string>

namespace zmap {

/// Base of every error raised by the numerical library.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonHermitianInput : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class NotUnitary : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class DimensionMismatch : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// The band basis at the start of a cycle is undefined (degenerate H(k, eps0)).
class GapClosedAtStart : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

} // namespace zmap
