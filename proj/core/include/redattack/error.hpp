#ifndef REDATTACK_ERROR_HPP
#define REDATTACK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace redattack {

// Root of every error the library throws. Callers that only care about
// "something in the attack pipeline failed" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NTooLarge : public Error {
 public:
  using Error::Error;
};

// Thrown by BudgetedOracle when the query cap is reached. Attack drivers
// catch it and finalize with their best-so-far point.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted() : Error("query budget exhausted") {}
  using Error::Error;
};

class InvalidReference : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class DimensionChainError : public Error {
 public:
  using Error::Error;
};

class ExternalProtocolError : public Error {
 public:
  using Error::Error;
};

class ZeroVariance : public Error {
 public:
  using Error::Error;
};

class ImageTooSmall : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class IOFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace redattack

#endif  // REDATTACK_ERROR_HPP
