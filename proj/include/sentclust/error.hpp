#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentclust {

/// Invalid or inconsistent input data. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed line in a text input; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Numerical failure while fitting or training a model.
class NumericalError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace sentclust
