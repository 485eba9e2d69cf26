#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcgraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: dimension mismatch, out-of-range index, bad config value.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A weight matrix or mask does not have the structure an operation requires.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Feedforward initialization requested on a mask that is not feedforward.
class InitNotApplicableError : public Error {
 public:
  using Error::Error;
};

/// Inference produced a non-finite value.
class DivergedError : public Error {
 public:
  DivergedError(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Data does not match the declared or expected layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcgraph
