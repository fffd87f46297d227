#include "amoebas/rational.hpp"

#include "amoebas/errors.hpp"

#include <cmath>
#include <limits>

namespace amoebas {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// cpp_int reads a leading 0 as an octal prefix.
BigInt decimal_digits(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return BigInt{std::string(s)};
}

BigInt parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw InputError("not an integer: '" + std::string(s) + "'");
  BigInt value = decimal_digits(s);
  return negative ? BigInt(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw InputError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash));
    BigInt den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  // Scientific notation is exact too: mantissa times a power of ten.
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    const Rational mantissa = parse_rational(text.substr(0, e));
    const BigInt power = parse_integer(text.substr(e + 1));
    if (power > 100000 || power < -100000) throw InputError("exponent out of range in '" + std::string(text) + "'");
    const long p = static_cast<long>(power);
    const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(p < 0 ? -p : p));
    return p < 0 ? Rational(mantissa / scale) : Rational(mantissa * scale);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view head = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !head.empty() && head.front() == '-';
    if (!head.empty() && (head.front() == '-' || head.front() == '+')) head.remove_prefix(1);
    if (head.empty()) head = "0";
    if (!all_digits(head) || (!frac.empty() && !all_digits(frac))) {
      throw InputError("malformed decimal '" + std::string(text) + "'");
    }
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt digits = decimal_digits(std::string(head) + std::string(frac));
    Rational value(digits, scale);
    return negative ? Rational(-value) : value;
  }

  return Rational(parse_integer(text));
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw InputError("non-finite value cannot be made rational");
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // 53 significant bits fit exactly after scaling.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r{BigInt(scaled)};
  if (exponent > 0) {
    r *= Rational(boost::multiprecision::pow(BigInt(2), static_cast<unsigned>(exponent)));
  } else if (exponent < 0) {
    r /= Rational(boost::multiprecision::pow(BigInt(2), static_cast<unsigned>(-exponent)));
  }
  return r;
}

std::string to_string(const Rational& value) {
  const BigInt& den = boost::multiprecision::denominator(value);
  if (den == 1) return boost::multiprecision::numerator(value).str();
  return boost::multiprecision::numerator(value).str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

double log_abs(const Rational& value) {
  if (value == 0) return -std::numeric_limits<double>::infinity();
  auto log_big = [](BigInt x) {
    if (x < 0) x = -x;
    std::size_t bits = boost::multiprecision::msb(x) + 1;
    if (bits <= 1000) return std::log(x.convert_to<double>());
    std::size_t shift = bits - 64;
    BigInt top = x >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
  };
  return log_big(boost::multiprecision::numerator(value)) -
         log_big(boost::multiprecision::denominator(value));
}

RationalVector to_rational(const std::vector<long>& v) {
  RationalVector out;
  out.reserve(v.size());
  for (long x : v) out.emplace_back(x);
  return out;
}

std::vector<double> to_double(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

}  // namespace amoebas
