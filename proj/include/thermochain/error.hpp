#pragma once

#include <stdexcept>
#include <string>

namespace thermochain {

/// Broad failure class. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kValidation,  // bad input: malformed files, inconsistent parameters
  kNumerical,   // numerical guard tripped: Euler instability, oracle size limit
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace thermochain
