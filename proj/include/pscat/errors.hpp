#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pscat {

// Base of every error the library raises. The CLI maps the concrete kind
// onto its exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Query outside the range a table was built for.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Evaluation too close to a pole of the secular function.
class PoleError : public Error {
 public:
  PoleError(double lambda, double norm)
      : Error("pole: lambda=" + std::to_string(lambda) +
              " coincides with norm " + std::to_string(norm)),
        lambda_(lambda),
        norm_(norm) {}
  double lambda() const { return lambda_; }
  double norm() const { return norm_; }

 private:
  double lambda_;
  double norm_;
};

// No sign change could be captured inside an interlacing interval.
class BracketError : public Error {
 public:
  BracketError(double lower, double upper)
      : Error("bracket failure on (" + std::to_string(lower) + ", " +
              std::to_string(upper) + "): precision exhausted"),
        lower_(lower),
        upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

class CapacityError : public Error {
 public:
  CapacityError(std::size_t required, std::size_t cap)
      : Error("norm table needs ~" + std::to_string(required) +
              " items, cap is " + std::to_string(cap)),
        required_(required) {}
  std::size_t required() const { return required_; }

 private:
  std::size_t required_;
};

// A supplied sequence does not interlace with the norms.
class InterlacingError : public Error {
 public:
  InterlacingError(std::size_t index, const std::string& what)
      : Error("interlacing violated at index " + std::to_string(index) +
              ": " + what),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace pscat
