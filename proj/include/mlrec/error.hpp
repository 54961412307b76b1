#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mlrec {

// Base for every error raised by the library. The CLI maps these onto exit
// codes: InputError -> 2, UnknownEntityError -> 3, anything else -> 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: files, configs, schema, parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

// A seed or lookup referenced an entity (or role) the graph does not contain.
class UnknownEntityError : public InputError {
 public:
  UnknownEntityError(std::string what, std::vector<std::string> near_misses = {})
      : InputError(std::move(what)), near_misses_(std::move(near_misses)) {}

  const std::vector<std::string>& near_misses() const { return near_misses_; }

 private:
  std::vector<std::string> near_misses_;
};

// An iterative solver stopped before reaching its residual target.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string what, int iterations, double residual)
      : Error(std::move(what)), iterations_(iterations), residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace mlrec
