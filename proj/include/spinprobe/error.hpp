#pragma once

#include <stdexcept>
#include <string>

namespace spinprobe {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violated an operation's precondition (domain, sign, shape).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The RK4 step needed for the requested horizon is too small to be practical.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

/// A linear-algebra or stationary-state computation had no unique answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files (cross sections, configs, envelopes).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinprobe
