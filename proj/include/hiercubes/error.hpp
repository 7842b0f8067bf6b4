#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hiercubes {

enum class ErrorCode {
  InvalidArgument,
  UnstableModel,
  Undetermined,
  Divergent,
  SaturatedProfile,
  InvalidProfile,
  OutsideUnitBall,
  InfiniteEnergyOccupied,
  InfeasibleCounts,
  NoFixedPoints,
  Tangent,
  Diverging,
  NotSummable,
  TooLarge,
  MixedEnsembles,
  UnsupportedModel,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by fixed_points() at eps == c_d; carries the unique tangent solution.
class TangentError : public Error {
 public:
  TangentError(double x, const std::string& what) : Error(ErrorCode::Tangent, what), x_(x) {}
  double fixed_point() const noexcept { return x_; }

 private:
  double x_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace hiercubes
