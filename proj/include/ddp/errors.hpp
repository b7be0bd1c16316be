#pragma once

#include <stdexcept>
#include <string>

namespace ddp {

enum class Errc {
  CapExceeded,
  ArityMismatch,
  ParseError,
  BadArity,
  NotSatisfying,
  InvalidSolution,
  BadRatio,
  UnequalClasses,
  NotAClique,
  NotMinimal,
  NoGapFound,
  RestrictedUnsupported,
  InvalidDecomposition,
  BudgetExceeded,
  TerminalVertex,
  PreconditionFailed,
  TripleTooSmall,
  NoFreePairAvailable,
  InvalidArgument,
};

const char* errc_name(Errc e);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& reason)
      : std::runtime_error(std::string(errc_name(code)) + ": " + reason), code_(code), reason_(reason) {}
  Errc code() const { return code_; }
  const std::string& reason() const { return reason_; }

 private:
  Errc code_;
  std::string reason_;
};

}  // namespace ddp
