#include "phvs/error.hpp"

namespace phvs {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonUnit: return "NonUnit";
    case Errc::NotASquare: return "NotASquare";
    case Errc::NotPrimitive: return "NotPrimitive";
    case Errc::RingMismatch: return "RingMismatch";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::NonUnitValue: return "NonUnitValue";
    case Errc::SingularHessian: return "SingularHessian";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::NoUnitCoefficient: return "NoUnitCoefficient";
    case Errc::DegreeDivisible: return "DegreeDivisible";
    case Errc::EvenModulus: return "EvenModulus";
    case Errc::DegenerateCritical: return "DegenerateCritical";
    case Errc::DegenerateCriticalFound: return "DegenerateCriticalFound";
    case Errc::NotBernsteinPair: return "NotBernsteinPair";
    case Errc::BadPrime: return "BadPrime";
    case Errc::Parse: return "Parse";
    case Errc::Overflow: return "Overflow";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace phvs
