#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace powertalk {

// Base class for all library errors.  Every error carries a stable
// machine-readable code (snake_case) that the CLI prints alongside the
// human-readable message, so scripts can dispatch on failures.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// A numeric or structural input is outside its documented domain.
struct InvalidParameterError : Error {
  explicit InvalidParameterError(const std::string& m) : Error("invalid_parameter", m) {}
};

// A function was called with arguments that do not fit together
// (mismatched sizes, out-of-range index, empty set where one is required).
struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& m) : Error("invalid_argument", m) {}
};

// The nonlinear solver failed to converge.
struct NoSolutionError : Error {
  explicit NoSolutionError(const std::string& m) : Error("no_solution", m) {}
};

// The solver converged, but to an operating point below the collapse floor.
struct VoltageCollapseError : Error {
  explicit VoltageCollapseError(const std::string& m) : Error("voltage_collapse", m) {}
};

// An operation requires a converter mode the addressed converter is not in.
struct InvalidModeError : Error {
  explicit InvalidModeError(const std::string& m) : Error("invalid_mode", m) {}
};

// An operation would push a quantity outside its configured constraints.
struct ConstraintError : Error {
  explicit ConstraintError(const std::string& m) : Error("constraint_violation", m) {}
};

// An exhaustive algorithm was asked to run beyond its enforced size cap.
struct SizeLimitError : Error {
  explicit SizeLimitError(const std::string& m) : Error("size_limit", m) {}
};

// Distributed agents reached inconsistent decisions.
struct ProtocolFailureError : Error {
  explicit ProtocolFailureError(const std::string& m) : Error("protocol_failure", m) {}
};

// A declared extension point that has no implementation yet.
struct UnimplementedError : Error {
  explicit UnimplementedError(const std::string& m) : Error("unimplemented", m) {}
};

// Scenario text could not be parsed or failed validation.
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error("parse_error", m) {}
};

// Filesystem failure (missing scenario, unwritable output directory, ...).
struct IoError : Error {
  explicit IoError(const std::string& m) : Error("io_error", m) {}
};

}  // namespace powertalk
