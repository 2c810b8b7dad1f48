#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "recur/error.hpp"

namespace recur {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational with a power-of-two denominator: numerator / 2^exponent,
/// kept in canonical form (numerator odd, or zero with exponent 0).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long long value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Dyadic(BigInt numerator, std::uint64_t exponent) : num_(std::move(numerator)), exp_(exponent) { normalize(); }

  /// 2^-n.
  static Dyadic half_pow(std::uint64_t n) { return Dyadic(BigInt(1), n); }

  const BigInt& numerator() const noexcept { return num_; }
  std::uint64_t exponent() const noexcept { return exp_; }
  bool is_zero() const noexcept { return num_ == 0; }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.exp_ >= b.exp_) return Dyadic(a.num_ + (b.num_ << static_cast<unsigned>(a.exp_ - b.exp_)), a.exp_);
    return Dyadic((a.num_ << static_cast<unsigned>(b.exp_ - a.exp_)) + b.num_, b.exp_);
  }
  friend Dyadic operator-(const Dyadic& a) {
    Dyadic r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) { return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_); }
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  /// Multiplication by 2^-n.
  Dyadic scaled_down(std::uint64_t n) const { return Dyadic(num_, exp_ + n); }

  Dyadic pow(std::uint64_t e) const {
    Dyadic result(1);
    Dyadic base = *this;
    while (e != 0) {
      if ((e & 1U) != 0) result *= base;
      e >>= 1U;
      if (e != 0) base *= base;
    }
    return result;
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept { return a.exp_ == b.exp_ && a.num_ == b.num_; }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    BigInt lhs = a.num_;
    BigInt rhs = b.num_;
    if (a.exp_ < b.exp_) lhs <<= static_cast<unsigned>(b.exp_ - a.exp_);
    if (b.exp_ < a.exp_) rhs <<= static_cast<unsigned>(a.exp_ - b.exp_);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  double to_double() const {
    // Shift so the conversion keeps ~60 significant bits.
    auto bits = num_ == 0 ? 0U : static_cast<unsigned>(boost::multiprecision::msb(abs(num_)));
    if (bits > 60) {
      unsigned drop = bits - 60;
      return std::ldexp(static_cast<double>(BigInt(num_ >> drop)), static_cast<int>(drop) - static_cast<int>(exp_));
    }
    return std::ldexp(static_cast<double>(num_), -static_cast<int>(exp_));
  }

  /// "num/2^exp".
  std::string to_string() const { return num_.str() + "/2^" + std::to_string(exp_); }

  /// Decimal integer parse; BigInt's own string constructor would read a
  /// leading 0 as octal.
  static BigInt parse_int(std::string_view text) {
    bool negative = !text.empty() && text[0] == '-';
    if (negative || (!text.empty() && text[0] == '+')) text.remove_prefix(1);
    if (text.empty()) throw ParseError("empty integer");
    BigInt value = 0;
    for (char c : text) {
      if (c < '0' || c > '9') throw ParseError("invalid digit in '" + std::string(text) + "'");
      value = value * 10 + (c - '0');
    }
    return negative ? BigInt(-value) : value;
  }

  /// Accepts "num/2^exp", "num/den" with den a power of two, an integer, or
  /// a finite decimal such as "0.375" whose value is dyadic.
  static Dyadic parse(std::string_view text) {
    std::string s(text);
    auto fail = [&]() -> Dyadic { throw ParseError("'" + s + "' is not a dyadic rational"); };
    try {
      if (auto caret = s.find("/2^"); caret != std::string::npos) {
        auto exp = std::stoull(s.substr(caret + 3));
        return Dyadic(parse_int(s.substr(0, caret)), exp);
      }
      if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt num = parse_int(s.substr(0, slash));
        BigInt den = parse_int(s.substr(slash + 1));
        if (den <= 0 || (den & (den - 1)) != 0) return fail();
        return Dyadic(num, boost::multiprecision::msb(den));
      }
      if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        auto places = static_cast<unsigned>(s.size() - dot - 1);
        BigInt num = parse_int(digits.empty() || digits == "-" ? std::string("0") : digits);
        // num/10^p = num/(5^p 2^p) is dyadic iff 5^p divides num.
        BigInt five = boost::multiprecision::pow(BigInt(5), places);
        if (num % five != 0) return fail();
        return Dyadic(num / five, places);
      }
      return Dyadic(parse_int(s), 0);
    } catch (const ParseError&) {
      return fail();
    } catch (const std::exception&) {
      return fail();
    }
  }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    auto tz = static_cast<std::uint64_t>(boost::multiprecision::lsb(abs(num_)));
    auto drop = tz < exp_ ? tz : exp_;
    if (drop > 0) {
      num_ >>= static_cast<unsigned>(drop);
      exp_ -= drop;
    }
  }

  BigInt num_{0};
  std::uint64_t exp_ = 0;
};

}  // namespace recur
