#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace spread {

/// Exact arbitrary-precision rational used for probabilities and mean matrices.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q" or "p" (nonnegative integers, no whitespace). Throws ParseError.
Rational parse_rational(std::string_view text);

/// Reduced "p/q" form; integers print without a denominator.
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace spread
