#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oscforce {

enum class ErrorCode {
  precondition,
  overflow,
  budget_exhausted,
  alphabet_mismatch,
  missing_bit,
  refine_failure,
  labeler_violation,
  invariant_violation,
  parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::budget_exhausted: return "budget-exhausted";
    case ErrorCode::alphabet_mismatch: return "alphabet-mismatch";
    case ErrorCode::missing_bit: return "missing-bit";
    case ErrorCode::refine_failure: return "refine-failure";
    case ErrorCode::labeler_violation: return "labeler-violation";
    case ErrorCode::invariant_violation: return "invariant-violation";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace oscforce
