#pragma once

#include <stdexcept>
#include <string>

namespace qtele {

// Root of every error thrown by the library. The CLI maps ConfigError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A configuration value or combination of values is invalid. `field()` is the
// dotted path of the offending entry (e.g. "fiber.atten_db_per_km").
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message, int line = -1)
      : Error(format(field, message, line)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message, int line) {
    std::string out = field + ": " + message;
    if (line >= 0) out += " (line " + std::to_string(line) + ")";
    return out;
  }

  std::string field_;
  int line_;
};

class DegenerateHeraldError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& message, double achievable_max)
      : Error(message), achievable_max_(achievable_max) {}
  double achievable_max() const { return achievable_max_; }

 private:
  double achievable_max_;
};

class CompensationError : public Error {
 public:
  CompensationError(const std::string& message, double best_infidelity)
      : Error(message), best_infidelity_(best_infidelity) {}
  double best_infidelity() const { return best_infidelity_; }

 private:
  double best_infidelity_;
};

class UnsortedInputError : public Error {
 public:
  using Error::Error;
};

// Stokes extraction hit a basis pair with zero total counts.
class UndefinedAxisError : public Error {
 public:
  UndefinedAxisError(char axis, const std::string& message) : Error(message), axis_(axis) {}
  char axis() const { return axis_; }

 private:
  char axis_;
};

class UndefinedVisibilityError : public Error {
 public:
  using Error::Error;
};

class IncompleteRunError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtele
