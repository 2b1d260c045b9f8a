#pragma once

#include <stdexcept>
#include <string>

namespace porohom {

enum class ErrorKind {
  geometry,
  alignment,
  domain,
  configuration,
  solver,
  state,
  step_rejected,
  io,
  verification,
  harness,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the C layer can map it
// to a status code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(ErrorKind::solver, what),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, double residual = 0.0)
      : Error(ErrorKind::configuration, what), residual_(residual) {}

  /// Compatibility residual when the rejection came from the charge balance.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace porohom
