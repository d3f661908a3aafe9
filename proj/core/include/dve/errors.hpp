#pragma once

#include <stdexcept>
#include <string>

namespace dve {

/// Base class for all solver and configuration failures.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Pointwise dual-to-primal solve failure.
class DtpError : public SolveError {
 public:
  enum class Kind { NoBracket, NonMonotone, SingularDerivative };

  DtpError(Kind kind, const std::string& what) : SolveError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class SingularMatrixError : public SolveError {
 public:
  using SolveError::SolveError;
};

/// Configuration error naming the offending field.
class ConfigError : public SolveError {
 public:
  ConfigError(std::string field, const std::string& what)
      : SolveError(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class UnknownCaseError : public SolveError {
 public:
  using SolveError::SolveError;
};

/// Requested witness formula does not apply to the point's regime.
class RegimeMismatchError : public SolveError {
 public:
  using SolveError::SolveError;
};

/// Base-state profile cannot satisfy its boundary data with admissible slopes.
class InfeasibleProfileError : public SolveError {
 public:
  using SolveError::SolveError;
};

}  // namespace dve
