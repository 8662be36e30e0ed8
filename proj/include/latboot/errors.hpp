#pragma once

#include <stdexcept>
#include <string>

namespace latboot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A lattice order above the configured cap, or a dense object too large to build.
class SizeError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// N is too small for the request: no respecting multiindex exists, or a step
// size is undefined.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class MissingMomentError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Precondition violation on a numeric argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace latboot
