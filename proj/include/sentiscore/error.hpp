#pragma once

#include <stdexcept>
#include <string>

namespace sentiscore {

// Root of all library errors. The CLI maps the three branches below onto
// its exit codes: usage = 2, data = 3, numeric = 4.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// Anything wrong with the inputs: files, formats, ranges, shapes.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: divergence, non-finite values, degenerate variance.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class RangeError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInputError : public DataError {
 public:
  using DataError::DataError;
};

class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateVarianceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace sentiscore
