#include "keycast/error.hpp"

namespace keycast {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCyclic: return "CYCLIC";
    case ErrorCode::kUnknownNode: return "UNKNOWN_NODE";
    case ErrorCode::kInvalidInstance: return "INVALID_INSTANCE";
    case ErrorCode::kWidthMismatch: return "WIDTH_MISMATCH";
    case ErrorCode::kNonintegralAlphabet: return "NONINTEGRAL_ALPHABET";
    case ErrorCode::kSpaceLimit: return "SPACE_LIMIT";
    case ErrorCode::kBadCoords: return "BAD_COORDS";
    case ErrorCode::kNotUniform: return "NOT_UNIFORM";
    case ErrorCode::kMultiSource: return "MULTI_SOURCE";
    case ErrorCode::kNonzeroB: return "NONZERO_B";
    case ErrorCode::kNotLinear: return "NOT_LINEAR";
    case ErrorCode::kRankDeficient: return "RANK_DEFICIENT";
    case ErrorCode::kMultiMessageSource: return "MULTI_MESSAGE_SOURCE";
    case ErrorCode::kBadRate: return "BAD_RATE";
    case ErrorCode::kCapacityExceeded: return "CAPACITY_EXCEEDED";
    case ErrorCode::kKeyNotSourceFunction: return "KEY_NOT_SOURCE_FUNCTION";
    case ErrorCode::kBadAlpha: return "BAD_ALPHA";
    case ErrorCode::kNotGapInstance: return "NOT_GAP_INSTANCE";
    case ErrorCode::kUnsupportedR: return "UNSUPPORTED_R";
    case ErrorCode::kBudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::kParse: return "PARSE";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace keycast
