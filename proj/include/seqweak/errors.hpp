#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqweak {

// Parameter outside its mathematical domain (angles, noise weights, invalid states).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Conditioning on an outcome whose probability is numerically zero.
class DegenerateBranchError : public DomainError {
 public:
  using DomainError::DomainError;
};

// beta = 2 (separable reference state): the guessing bound divides by zero.
class UncertifiableError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A threshold bracket whose endpoints agree on the criterion.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or incomplete count data. `row()` is the 1-based file line, 0 if unknown.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace seqweak
