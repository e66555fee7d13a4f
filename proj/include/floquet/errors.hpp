#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

/// Base class for all structured solver errors. `kind()` is a stable
/// machine-readable tag used by the CLI when echoing errors as JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A Floquet channel sits on a band edge E + alpha*omega = +-2*kappa,
/// where scattering amplitudes diverge.
class ChannelOpeningError : public Error {
 public:
  ChannelOpeningError(int alpha, double energy, const std::string& msg)
      : Error("ChannelOpening", msg), alpha_(alpha), energy_(energy) {}
  int alpha() const noexcept { return alpha_; }
  double energy() const noexcept { return energy_; }

 private:
  int alpha_;
  double energy_;
};

class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(const std::string& msg)
      : Error("NoConvergence", msg) {}
};

class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(const std::string& msg)
      : Error("SingularMatrix", msg) {}
};

class ScanResolutionError : public Error {
 public:
  explicit ScanResolutionError(const std::string& msg)
      : Error("ScanResolutionTooCoarse", msg) {}
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& msg)
      : Error("GeometryError", msg) {}
};

class BoundaryBreachError : public Error {
 public:
  explicit BoundaryBreachError(const std::string& msg)
      : Error("BoundaryBreach", msg) {}
};

class StepTooLargeError : public Error {
 public:
  explicit StepTooLargeError(const std::string& msg)
      : Error("StepTooLarge", msg) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& msg)
      : Error("ParseError", "line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg)
      : Error("ValidationError", msg) {}
};

}  // namespace floquet
