#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "distortion_lab/errors.hpp"

namespace distortion_lab {

/// Exact arbitrary-precision rational used for every distance and probability
/// on rational metrics.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw InvalidParams("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Canonical "p/q" form; integers are written with an explicit "/1".
inline std::string format_rational(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

/// Accepts "p/q", "p" and finite decimals such as "-0.5".
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { return ParseError("malformed rational '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  auto parse_int = [&](std::string_view s) {
    std::size_t i = (s.size() > 0 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) throw fail();
    for (std::size_t j = i; j < s.size(); ++j)
      if (s[j] < '0' || s[j] > '9') throw fail();
    // Leading zeros would select octal in the BigInt string constructor.
    std::size_t first = i;
    while (first + 1 < s.size() && s[first] == '0') ++first;
    std::string body(s.substr(first));
    return BigInt(s[0] == '-' ? "-" + body : body);
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) throw fail();
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
    std::size_t frac = text.size() - dot - 1;
    if (frac == 0 || digits.empty() || digits == "-" || digits == "+") throw fail();
    BigInt den = 1;
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
    return Rational(parse_int(digits), den);
  }
  return Rational(parse_int(text));
}

}  // namespace distortion_lab
