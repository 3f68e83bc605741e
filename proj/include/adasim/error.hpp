#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adasim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, const std::string& source = {})
      : Error(source + (line == 0 ? "" : "line " + std::to_string(line) + ": ") + message),
        message_(message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested removal count exceeds the edges outside the spanning forest.
class InfeasibleRatio : public Error {
 public:
  InfeasibleRatio(const std::string& what, double max_ratio) : Error(what), max_ratio_(max_ratio) {}
  double max_ratio() const noexcept { return max_ratio_; }

 private:
  double max_ratio_;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during optimisation, zero vectors, undefined statistics.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace adasim
