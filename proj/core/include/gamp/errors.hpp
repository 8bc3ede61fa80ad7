#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gamp {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Incompatible or incomplete configuration (e.g. max-sum with a spike-and-slab prior).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// GAMP iterates became non-finite. Carries the relative-change trace up to the failure.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::vector<double> trace)
      : NumericError(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace gamp
