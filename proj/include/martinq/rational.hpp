#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace martinq {

/// Arbitrary-precision rational number.
using Rational = mpq_class;

/// Parses "p", "p/q" or "-p/q". Throws ParseError on malformed input or a
/// zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& value);

/// Nearest double; saturates to +-inf instead of wrapping for huge values.
double to_double(const Rational& value);

/// Integer power of a rational, exponent >= 0.
Rational pow(const Rational& base, unsigned long exponent);

}  // namespace martinq
