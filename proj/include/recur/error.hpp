#pragma once

#include <stdexcept>
#include <string>

namespace recur {

// Base of every error raised by the library. The CLI maps all of these to
// exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

// A finite source (file-backed sequence) ran out before the requested index.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// A tail modulus could not certify a requested bound within the search limit.
class NoCertificate : public Error {
 public:
  using Error::Error;
};

// The requested estimate does not apply to the given parameters.
class Inapplicable : public Error {
 public:
  using Error::Error;
};

// An exhaustive enumeration would exceed the configured size budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A fixed-point comparison fell inside its error bound.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// A continued-fraction search ran past its depth limit.
class DepthExhausted : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace recur
