#pragma once

#include <stdexcept>
#include <string>

namespace hk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a library call (dimension mismatch, non-positive epsilon, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// det Z_t vanished along a trajectory.
class CausticError : public Error {
 public:
  using Error::Error;
};

/// The argument of det Z_t moved too far in one step to certify continuity.
class StepTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A trajectory produced a non-finite state.
class TrajectoryError : public Error {
 public:
  TrajectoryError(const std::string& what, std::size_t index, double time)
      : Error(what), index_(index), time_(time) {}
  std::size_t index() const { return index_; }
  double time() const { return time_; }

 private:
  std::size_t index_;
  double time_;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Configuration validation failure; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hk
