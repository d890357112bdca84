#pragma once

#include <stdexcept>
#include <string>

namespace fpcert {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside its admissible domain (p <= 1, theta not in (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Vectors that should be linearly independent are not.
class DependenceError : public Error {
 public:
  using Error::Error;
};

// A map cannot be realized at the requested truncation.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpcert
