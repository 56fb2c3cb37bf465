#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specdescent {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested matrix would exceed the configured element cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation (gamma <= 0, sigma <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative method did not converge, or a computation produced non-finite values.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::size_t iterations = 0)
      : Error(what), iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

// A requested feature is unavailable for the given input (e.g. the derivative of a table).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Input is valid in shape but degenerate for the requested measurement.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace specdescent
