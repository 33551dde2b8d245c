#pragma once

#include <stdexcept>
#include <string>

namespace mvlab {

/// Failure categories. The numeric values double as CLI exit codes where the
/// command line defines one.
enum class ErrorKind {
  internal = 1,
  validation = 2,  ///< bad parameters, malformed config or usage
  numerical = 3,   ///< blow-up, non-finite field, non-convergence
  verification = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A field contains NaN or Inf.
struct InvalidFieldError : Error {
  explicit InvalidFieldError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// A scalar parameter is outside its admissible range.
struct ParameterError : Error {
  explicit ParameterError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Incompatible operands: different grids, particle counts, time grids, lengths.
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Time stepping produced a non-finite state.
struct BlowUpError : Error {
  BlowUpError(const std::string& what, int step) : Error(ErrorKind::numerical, what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace mvlab
