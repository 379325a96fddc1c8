#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sirspline {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument: out-of-domain time, index out of range, malformed grid.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A rate function was negative, non-finite or exceeded its declared bound.
class InvalidRateError : public Error {
 public:
  using Error::Error;
};

// Observed data violate a model invariant. `index()` is the offending
// observation or transition, when one can be named.
class DataValidityError : public Error {
 public:
  explicit DataValidityError(const std::string& what, std::size_t index = npos)
      : Error(what), index_(index) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// A Gaussian transition has zero (conditional) variance.
class DegenerateTransitionError : public Error {
 public:
  DegenerateTransitionError(const std::string& what, std::size_t transition)
      : Error(what), transition_(transition) {}
  std::size_t transition() const noexcept { return transition_; }

 private:
  std::size_t transition_;
};

// Every Monte-Carlo sub-path of a transition was absorbed or unusable.
class MonteCarloDegeneracyError : public Error {
 public:
  MonteCarloDegeneracyError(const std::string& what, std::size_t transition)
      : Error(what), transition_(transition) {}
  std::size_t transition() const noexcept { return transition_; }

 private:
  std::size_t transition_;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

class SelectionError : public Error {
 public:
  using Error::Error;
};

class IngestionError : public Error {
 public:
  using Error::Error;
};

}  // namespace sirspline
