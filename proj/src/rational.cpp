#include "keycast/rational.hpp"

#include <charconv>

#include "keycast/error.hpp"

namespace keycast {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    fail(ErrorCode::kParse, "not an exact fraction P/Q: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const std::int64_t num = parse_int(text.substr(0, slash), text);
  std::int64_t den = 1;
  if (slash != std::string_view::npos) den = parse_int(text.substr(slash + 1), text);
  if (den <= 0) fail(ErrorCode::kParse, "denominator must be positive: '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string format_rational(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

bool integral_product(const Rational& value, std::int64_t n, std::int64_t& out) {
  const Rational product = value * Rational(n);
  if (product.denominator() != 1) return false;
  out = product.numerator();
  return true;
}

}  // namespace keycast
