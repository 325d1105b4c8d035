#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bergman {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates its documented range (p < 2, L < 1, odd rho', ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the domain of the operation (|z| outside (0,1), t outside [0,1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The truncated series is not accurate enough at the requested radius.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, std::size_t required_length)
      : Error(what), required_length_(required_length) {}

  std::size_t required_length() const noexcept { return required_length_; }

 private:
  std::size_t required_length_;
};

/// Step-halving refinement did not reach the requested accuracy.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (singular Gram matrix, contour through a zero, ...).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace bergman
