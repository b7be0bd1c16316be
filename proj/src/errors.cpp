#include "ddp/errors.hpp"

namespace ddp {

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::BadArity: return "BadArity";
    case Errc::NotSatisfying: return "NotSatisfying";
    case Errc::InvalidSolution: return "InvalidSolution";
    case Errc::BadRatio: return "BadRatio";
    case Errc::UnequalClasses: return "UnequalClasses";
    case Errc::NotAClique: return "NotAClique";
    case Errc::NotMinimal: return "NotMinimal";
    case Errc::NoGapFound: return "NoGapFound";
    case Errc::RestrictedUnsupported: return "RestrictedUnsupported";
    case Errc::InvalidDecomposition: return "InvalidDecomposition";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::TerminalVertex: return "TerminalVertex";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::TripleTooSmall: return "TripleTooSmall";
    case Errc::NoFreePairAvailable: return "NoFreePairAvailable";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace ddp
