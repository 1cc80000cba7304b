#include "zeno/error.hpp"

namespace zeno {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyContinuum: return "EmptyContinuum";
    case ErrorKind::NotShifted: return "NotShifted";
    case ErrorKind::BranchAnnihilated: return "BranchAnnihilated";
    case ErrorKind::GuardExceeded: return "GuardExceeded";
    case ErrorKind::NoSurvivors: return "NoSurvivors";
    case ErrorKind::NoFiniteCount: return "NoFiniteCount";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace zeno
