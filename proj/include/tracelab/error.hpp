#pragma once

#include <stdexcept>
#include <string>

namespace tracelab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (bad exponent, length
/// mismatch, non-finite sample, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The hypotheses of a theorem are not met by the requested parameters. The
/// harness reports these as configuration errors rather than check failures.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// The discretization cannot resolve the requested quantity.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact failed; the message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace detail
}  // namespace tracelab
