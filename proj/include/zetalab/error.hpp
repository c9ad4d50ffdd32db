#pragma once

#include <stdexcept>
#include <string>

namespace zetalab {

// Base of every error raised by the library. Callers that only need a
// one-line diagnostic can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A lookup or sum needs values beyond the range a table was built for.
class RangeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ParityError : public Error {
 public:
  using Error::Error;
};

// Zeros are missing (or uncertified) on part of a window that a statistic needs.
class CoverageError : public Error {
 public:
  using Error::Error;
};

class SingularOrdinateError : public Error {
 public:
  SingularOrdinateError(const std::string& what, double t) : Error(what), ordinate(t) {}
  double ordinate;
};

class PoisonedSampleError : public Error {
 public:
  PoisonedSampleError(const std::string& what, double t) : Error(what), ordinate(t) {}
  double ordinate;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class DegenerateMeasureError : public Error {
 public:
  using Error::Error;
};

class InsufficientSampleError : public Error {
 public:
  using Error::Error;
};

class CacheError : public Error {
 public:
  using Error::Error;
};

}  // namespace zetalab
