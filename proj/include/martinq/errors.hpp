#pragma once

#include <stdexcept>
#include <string>

namespace martinq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownStateError : public Error {
 public:
  using Error::Error;
};

class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

class RunawayRunError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class MissingPredecessorsError : public Error {
 public:
  using Error::Error;
};

class ZeroDenominatorError : public Error {
 public:
  using Error::Error;
};

class NotInConeError : public Error {
 public:
  using Error::Error;
};

class RowSumError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Raised when an exact operation would leave Q + (1/pi)Q.
class InexactError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace martinq
