#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace keycast {

// Exact capacities and rates. Graph computations never touch floating point.
using Rational = boost::rational<std::int64_t>;

// "P/Q" or "P". Denominator must be positive; no decimal forms are accepted.
Rational parse_rational(std::string_view text);

// "P" when the denominator is 1, otherwise "P/Q" in lowest terms.
std::string format_rational(const Rational& value);

// Returns value * n when that product is an integer.
bool integral_product(const Rational& value, std::int64_t n, std::int64_t& out);

}  // namespace keycast
