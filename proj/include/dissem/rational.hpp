// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "dissem/errors.hpp"

namespace dissem {

// All model arithmetic is exact. Floating point appears only at output
// boundaries (CSV / regression / hitting-time evaluation).
using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpf_float_50;

inline BigInt rat_num(const Rational& q) { return numerator(q); }
inline BigInt rat_den(const Rational& q) { return denominator(q); }

/// Largest integer <= q.
inline BigInt rat_floor(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt t = n / d;
  if (n < 0 && t * d != n) --t;
  return t;
}

/// Smallest integer >= q.
inline BigInt rat_ceil(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt t = n / d;
  if (n > 0 && t * d != n) ++t;
  return t;
}

inline Rational rat_pow(const Rational& base, unsigned exp) {
  Rational r(1);
  Rational b = base;
  while (exp) {
    if (exp & 1u) r *= b;
    b *= b;
    exp >>= 1u;
  }
  return r;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline long floor_log2(long n) {
  detail::check(n >= 1, "floor_log2 needs n >= 1");
  long l = 0;
  while ((1L << (l + 1)) <= n) ++l;
  return l;
}

inline BigInt pow2(long e) {
  detail::check(e >= 0, "pow2 needs e >= 0");
  return BigInt(1) << static_cast<unsigned>(e);
}

namespace detail {

inline bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Parses "[-]digits[.digits][(e|E)[+-]digits]" into an exact rational.
inline Rational parse_decimal(const std::string& text) {
  std::string s = text;
  bool neg = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    neg = s[i] == '-';
    ++i;
  }
  std::string intpart, fracpart, exppart;
  bool expneg = false;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') intpart += s[i++];
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') fracpart += s[i++];
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      expneg = s[i] == '-';
      ++i;
    }
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') exppart += s[i++];
    if (exppart.empty()) throw DomainError("bad number literal: " + text);
  }
  if (i != s.size() || (intpart.empty() && fracpart.empty()))
    throw DomainError("bad number literal: " + text);
  BigInt mantissa(intpart.empty() ? "0" : intpart);
  for (char c : fracpart) mantissa = mantissa * 10 + (c - '0');
  Rational r(mantissa, boost::multiprecision::pow(BigInt(10),
                                                  unsigned(fracpart.size())));
  if (!exppart.empty()) {
    unsigned e = static_cast<unsigned>(std::stoul(exppart));
    BigInt p = boost::multiprecision::pow(BigInt(10), e);
    if (expneg)
      r /= Rational(p);
    else
      r *= Rational(p);
  }
  return neg ? -r : r;
}

}  // namespace detail

/// Parses a rational from "p/q", an integer literal, or exact decimal text
/// ("0.1" becomes 1/10, never a binary float).
inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return detail::parse_decimal(text);
  std::string num = text.substr(0, slash);
  std::string den = text.substr(slash + 1);
  std::string numabs = (!num.empty() && (num[0] == '-' || num[0] == '+'))
                           ? num.substr(1)
                           : num;
  if (!detail::all_digits(numabs) || !detail::all_digits(den))
    throw DomainError("bad rational literal: " + text);
  BigInt d{den};
  if (d == 0) throw DomainError("zero denominator: " + text);
  return Rational(BigInt(num), d);
}

/// Serializes exactly: "p" when the denominator is 1, else "p/q".
inline std::string format_rational(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Least common multiple of the (positive) values' denominators.
inline BigInt common_denominator(const std::vector<Rational>& values) {
  BigInt l(1);
  for (const auto& v : values) l = lcm(l, rat_den(v));
  return l;
}

}  // namespace dissem
