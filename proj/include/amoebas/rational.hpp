#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace amoebas {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

/// Parses "p/q", "p" or a finite decimal such as "-0.125" exactly.
Rational parse_rational(std::string_view text);

/// Exact value of a finite double.
Rational rational_from_double(double value);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// log|value| without overflowing a double for huge numerators.
double log_abs(const Rational& value);

RationalVector to_rational(const std::vector<long>& v);
std::vector<double> to_double(const RationalVector& v);

}  // namespace amoebas
