#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace cdl {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed input
/// or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" for integers, "p/q" (lowest terms) otherwise.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Exact floor(sqrt(x)) for x >= 0.
BigInt isqrt(const BigInt& x);

}  // namespace cdl
