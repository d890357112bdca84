#pragma once

// Scalar support for the two evaluation modes: IEEE double and exact rationals.

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "fpcert/errors.hpp"

namespace fpcert {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class Arithmetic { Float, Rational };

inline const char* to_string(Arithmetic a) {
  return a == Arithmetic::Float ? "FLOAT" : "RATIONAL";
}

template <class S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Rational>;

template <Scalar S>
inline constexpr bool is_exact_v = std::same_as<S, Rational>;

template <Scalar S>
inline constexpr Arithmetic arithmetic_of_v = is_exact_v<S> ? Arithmetic::Rational : Arithmetic::Float;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Exact conversion: every finite double is a dyadic rational.
template <Scalar S>
S from_double(double x) {
  if constexpr (is_exact_v<S>) {
    return Rational(x);
  } else {
    return x;
  }
}

inline double abs_of(double x) { return std::fabs(x); }
inline Rational abs_of(const Rational& x) { return boost::multiprecision::abs(x); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Rational&) { return true; }

// x^k for a nonnegative integer exponent, exact for rationals.
template <Scalar S>
S pow_int(const S& x, unsigned k) {
  S result(1);
  S base = x;
  while (k != 0) {
    if (k & 1u) result *= base;
    k >>= 1u;
    if (k != 0) base *= base;
  }
  return result;
}

// 2^-k exactly in both modes.
template <Scalar S>
S inv_pow2(unsigned k) {
  if constexpr (is_exact_v<S>) {
    return Rational(1, BigInt(1) << k);
  } else {
    return std::ldexp(1.0, -static_cast<int>(k));
  }
}

// a <= b, exactly for rationals and up to `tol` for doubles.
template <Scalar S>
bool le_tol(const S& a, const S& b, double tol) {
  if constexpr (is_exact_v<S>) {
    return a <= b;
  } else {
    return a <= b + tol;
  }
}

inline std::string to_string(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string to_string(const Rational& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Exact value of a decimal literal such as "-1.25e-3".
inline Rational parse_decimal_exact(std::string_view s) {
  std::string digits;
  bool negative = false;
  long long exponent = 0;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw ParameterError("malformed number '" + std::string(s) + "'");
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw ParameterError("malformed number '" + std::string(s) + "'");
    ++i;
    long long e = 0;
    std::string_view rest = s.substr(i);
    if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), e);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) {
      throw ParameterError("malformed exponent in '" + std::string(s) + "'");
    }
    exponent += e;
  }
  if (exponent > 4000 || exponent < -4000) throw ParameterError("exponent out of range in '" + std::string(s) + "'");
  // A leading zero would make the string constructor read octal.
  const auto nz = digits.find_first_not_of('0');
  BigInt mantissa(nz == std::string::npos ? std::string("0") : digits.substr(nz));
  if (negative) mantissa = -mantissa;
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  return exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
}

}  // namespace detail

// Parses a decimal literal or a "p/q" fraction. Rationals are parsed exactly.
template <Scalar S>
S parse_scalar(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s.empty()) throw ParameterError("empty number");
  Rational value;
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational num = detail::parse_decimal_exact(detail::trim(s.substr(0, slash)));
    const Rational den = detail::parse_decimal_exact(detail::trim(s.substr(slash + 1)));
    if (den == 0) throw ParameterError("zero denominator in '" + std::string(s) + "'");
    value = num / den;
  } else {
    if constexpr (!is_exact_v<S>) {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
        throw ParameterError("malformed number '" + std::string(s) + "'");
      }
      return x;
    }
    value = detail::parse_decimal_exact(s);
  }
  if constexpr (is_exact_v<S>) {
    return value;
  } else {
    return to_double(value);
  }
}

}  // namespace fpcert
