#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phvs {

enum class Errc {
  InvalidArgument,
  NonUnit,
  NotASquare,
  NotPrimitive,
  RingMismatch,
  ArityMismatch,
  NonUnitValue,
  SingularHessian,
  BudgetExceeded,
  NoUnitCoefficient,
  DegreeDivisible,
  EvenModulus,
  DegenerateCritical,
  DegenerateCriticalFound,
  NotBernsteinPair,
  BadPrime,
  Parse,
  Overflow,
  Internal,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace phvs
