#pragma once

#include <stdexcept>
#include <string>

namespace sspack {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files or arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// A value outside the mathematical domain of an operation (ratio >= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class InvalidWord : public Error {
 public:
  using Error::Error;
};

class IncompatibleSystems : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// The strong separation condition could not be certified. lower/upper bracket
// the minimal inter-cylinder distance at the point the search gave up.
class SscUncertified : public Error {
 public:
  SscUncertified(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

// A requested precision was not reached; carries the best certified bracket.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, double lo, double hi) : Error(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

// An operation refused to apply a result outside its certified hypothesis.
class PreconditionUnverified : public Error {
 public:
  using Error::Error;
};

}  // namespace sspack
