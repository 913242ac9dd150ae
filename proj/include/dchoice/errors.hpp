#pragma once

#include <stdexcept>
#include <string>

namespace dchoice {

// Invalid argument to a numerical kernel (non-finite input, bad interval,
// mismatched dimensions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed CSV or schema text. `row` is the 1-based record index in the
// source (header = 1), or 0 when not tied to a row.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Data that parses but violates the schema (unknown label, log of a
// non-positive value, missing column).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A covariate of the wrong kind was handed to an effects routine.
class KindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeparationError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dchoice
