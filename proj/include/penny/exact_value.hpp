#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "penny/error.hpp"

namespace penny {

using BigInt = boost::multiprecision::cpp_int;

/// An exact rational, always held in lowest terms with a positive
/// denominator. Rendered as "p/q" (integers too: "2/1").
class ExactValue {
 public:
  ExactValue() = default;
  ExactValue(std::int64_t integer) : value_(integer) {}  // NOLINT
  ExactValue(const BigInt& numerator, const BigInt& denominator) {
    if (denominator == 0) fail(ErrorCode::kInvalidParameter, "zero denominator");
    value_ = denominator < 0 ? Rational(-numerator, -denominator) : Rational(numerator, denominator);
  }

  static ExactValue fraction(std::int64_t numerator, std::int64_t denominator) {
    return ExactValue(BigInt(numerator), BigInt(denominator));
  }

  /// Accepts "p/q", "-7", and finite decimals such as "0.9" (read exactly).
  static ExactValue parse(std::string_view text);

  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }

  double to_double() const { return value_.convert_to<double>(); }

  std::string str() const { return numerator().str() + "/" + denominator().str(); }

  /// %.15g rendering for plotting columns.
  std::string decimal() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", to_double());
    return buf;
  }

  bool is_integer() const { return denominator() == 1; }

  ExactValue abs() const { return value_ < 0 ? -*this : *this; }

  ExactValue pow(std::size_t exponent) const {
    ExactValue result(1);
    ExactValue base = *this;
    while (exponent != 0) {
      if (exponent & 1u) result *= base;
      base *= base;
      exponent >>= 1u;
    }
    return result;
  }

  ExactValue operator-() const { return from(-value_); }
  ExactValue& operator+=(const ExactValue& o) { value_ += o.value_; return *this; }
  ExactValue& operator-=(const ExactValue& o) { value_ -= o.value_; return *this; }
  ExactValue& operator*=(const ExactValue& o) { value_ *= o.value_; return *this; }
  ExactValue& operator/=(const ExactValue& o) {
    if (o.value_ == 0) fail(ErrorCode::kInvalidParameter, "division by zero");
    value_ /= o.value_;
    return *this;
  }
  friend ExactValue operator+(ExactValue a, const ExactValue& b) { return a += b; }
  friend ExactValue operator-(ExactValue a, const ExactValue& b) { return a -= b; }
  friend ExactValue operator*(ExactValue a, const ExactValue& b) { return a *= b; }
  friend ExactValue operator/(ExactValue a, const ExactValue& b) { return a /= b; }

  friend bool operator==(const ExactValue& a, const ExactValue& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const ExactValue& a, const ExactValue& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  using Rational = boost::multiprecision::cpp_rational;

  static ExactValue from(Rational r) {
    ExactValue v;
    v.value_ = std::move(r);
    return v;
  }

  Rational value_{0};
};

inline ExactValue ExactValue::parse(std::string_view text) {
  auto bad = [&]() -> ExactValue {
    fail(ErrorCode::kInvalidParameter, "malformed rational '" + std::string(text) + "'");
  };
  auto parse_int = [&](std::string_view digits) -> BigInt {
    std::string_view body = digits;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
    if (body.empty()) bad();
    for (char c : body) {
      if (c < '0' || c > '9') bad();
    }
    return BigInt(std::string(digits.front() == '+' ? digits.substr(1) : digits));
  };
  if (text.empty()) return bad();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return ExactValue(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.front() == '-' || frac.front() == '+') return bad();
    bool negative = !whole.empty() && whole.front() == '-';
    std::string digits(whole);
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt magnitude = parse_int(digits);
    if (magnitude < 0) magnitude = -magnitude;
    magnitude = magnitude * scale + parse_int(frac);
    return ExactValue(negative ? BigInt(-magnitude) : magnitude, scale);
  }
  return ExactValue(parse_int(text), BigInt(1));
}

}  // namespace penny
