#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "ultrafractal/errors.hpp"

namespace ultrafractal {

/// Exact arbitrary-precision rational used for every norm and distance.
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& q) { return q.str(); }

inline Rational power(const Rational& base, std::size_t exponent) {
  Rational result{1};
  Rational b = base;
  while (exponent != 0) {
    if ((exponent & 1U) != 0) result *= b;
    b *= b;
    exponent >>= 1U;
  }
  return result;
}

/// Parses "p/q" or "p" (optional leading '-').
inline Rational parse_rational(std::string_view text) {
  using boost::multiprecision::cpp_int;
  auto parse_int = [&](std::string_view digits, std::size_t offset) {
    if (digits.empty()) throw ParseError("expected digits in rational literal", offset);
    std::size_t start = digits.front() == '-' ? 1 : 0;
    if (start == digits.size()) throw ParseError("expected digits in rational literal", offset);
    for (std::size_t i = start; i < digits.size(); ++i) {
      if (std::isdigit(static_cast<unsigned char>(digits[i])) == 0) {
        throw ParseError("unexpected character in rational literal", offset + i);
      }
    }
    return cpp_int(std::string(digits));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, 0));
  const cpp_int num = parse_int(text.substr(0, slash), 0);
  const std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && den_text.front() == '-') throw ParseError("negative denominator", slash + 1);
  const cpp_int den = parse_int(den_text, slash + 1);
  if (den == 0) throw ParseError("zero denominator", slash + 1);
  return Rational(num, den);
}

}  // namespace ultrafractal
