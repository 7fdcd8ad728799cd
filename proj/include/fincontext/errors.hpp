#pragma once

#include <stdexcept>
#include <string>

namespace fincontext {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclass to a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-range numeric parameter (non-positive Dirichlet alpha, eta outside (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Context chain is not irreducible, or the stationary iteration did not converge.
class ErgodicityError : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration or a context table would exceed the configured budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: wrong codeword length, unknown token id, bad file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Symbol outside the alphabet.
class AlphabetError : public Error {
 public:
  using Error::Error;
};

/// Fragmentation code maps two source symbols to the same codeword.
class InjectivityError : public Error {
 public:
  using Error::Error;
};

/// Input data too short or otherwise unusable for the requested statistic.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Source predictor handed to the transfer construction has a zero entry.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// A modelling assumption does not hold (e.g. delta = 0 for heavy-hitting analysis).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace fincontext
