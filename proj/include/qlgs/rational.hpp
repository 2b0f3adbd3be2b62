#pragma once

#include <boost/rational.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace qlgs {

// Exact rational arithmetic for the exponent formulas.  Magnitudes stay tiny
// (dimensions, powers of q), so long long never overflows in practice.
using Rational = boost::rational<long long>;

// "p/q" reduced, or just "p" for integers.
std::string to_string(const Rational& x);

double to_double(const Rational& x);

// Accepts "3", "-1/2", "0.25", "+7/3".  Decimals are converted exactly.
// Returns nullopt on malformed input or overflow.
std::optional<Rational> parse_rational(std::string_view text);

}  // namespace qlgs
