#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace keycast {

enum class ErrorCode {
  kCyclic,
  kUnknownNode,
  kInvalidInstance,
  kWidthMismatch,
  kNonintegralAlphabet,
  kSpaceLimit,
  kBadCoords,
  kNotUniform,
  kMultiSource,
  kNonzeroB,
  kNotLinear,
  kRankDeficient,
  kMultiMessageSource,
  kBadRate,
  kCapacityExceeded,
  kKeyNotSourceFunction,
  kBadAlpha,
  kNotGapInstance,
  kUnsupportedR,
  kBudgetExceeded,
  kParse,
  kInvalidArgument,
};

// Machine-readable name, e.g. "SPACE_LIMIT".
std::string_view to_string(ErrorCode code);

// True for errors caused by an enumeration or search exceeding a configured cap.
inline bool is_resource_limit(ErrorCode code) {
  return code == ErrorCode::kSpaceLimit || code == ErrorCode::kBudgetExceeded;
}

class KeycastError : public std::runtime_error {
 public:
  KeycastError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A broken internal invariant, e.g. a search witness that fails its re-check.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw KeycastError(code, message);
}

}  // namespace keycast
