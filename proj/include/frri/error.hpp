#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frri {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `row` is the 1-based line of the source and
/// `column` names the offending field (empty when the whole line is bad).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error(format(row, column, what)), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  static std::string format(std::size_t row, const std::string& column,
                            const std::string& what) {
    std::string out = "row " + std::to_string(row);
    if (!column.empty()) out += ", column '" + column + "'";
    return out + ": " + what;
  }

  std::size_t row_;
  std::string column_;
};

/// Value vectors or tables whose width does not match the model.
class ArityError : public Error {
 public:
  using Error::Error;
};

/// Model file could not be read back (bad version or schema).
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace frri
