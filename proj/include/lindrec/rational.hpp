#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace lindrec
{
    // Arbitrary precision rational used by the exact oracles.
    using Rational = boost::multiprecision::cpp_rational;

    // Parses a decimal literal ("0.3", "-2", "1e-3", "3/10") into an exact rational.
    // Throws std::invalid_argument on malformed input.
    Rational parse_rational(std::string_view text);

    // "num/den" in lowest terms; integers are printed as "n/1".
    std::string to_fraction_string(const Rational& q);

    inline double to_double(const Rational& q) { return q.convert_to<double>(); }
    inline double to_double(double x) { return x; }
}
