#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcscore {

enum class ErrorKind {
  InvalidArgument,
  NoDensity,
  MomentUndefined,
  ZeroVariance,
  DensityUnderflow,
  QuadratureFailure,
  EmptySupport,
  EmptyDraws,
  NonpositiveScale,
  TooFewDraws,
  SingularPosterior,
  NumericalUnderflow,
};

/// Stable lowercase identifier, used in CSV status columns.
std::string_view to_string(ErrorKind kind) noexcept;

/// Typed failure raised by every module. Callers that aggregate results
/// (experiments, forecast evaluation) catch it and record `kind()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mcscore
