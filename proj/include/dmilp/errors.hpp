#pragma once

#include <stdexcept>
#include <string>

namespace dmilp {

// Root of every exception thrown by the library. Solver outcomes such as an
// infeasible LP are reported through result statuses, not exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValidationKind { DimensionMismatch, Unbounded, InfeasibleLocalSet };

const char* to_string(ValidationKind kind);

class ValidationError : public Error {
 public:
  ValidationError(ValidationKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ValidationKind kind() const { return kind_; }

 private:
  ValidationKind kind_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class NodeLimitExceeded : public Error {
 public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class BaselineInfeasible : public Error {
 public:
  using Error::Error;
};

class NotSettled : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dmilp
