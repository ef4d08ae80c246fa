#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lasp {

/// Exact rational number. Numeric fluents are kept exact so that
/// comparisons like temperature vs tolerance are reproducible bit-for-bit
/// across runs and platforms.
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor): numbers convert implicitly
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { normalize(); }

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }

  /// Parses "12", "-3", "4.25". The decimal form always yields a terminating
  /// rational, so render() round-trips exactly.
  static Rational parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty numeric literal");
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '-' || text[pos] == '+') {
      negative = text[pos] == '-';
      ++pos;
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    std::int64_t scale = 1;
    bool any_digit = false;
    for (; pos < text.size() && text[pos] != '.'; ++pos) {
      if (text[pos] < '0' || text[pos] > '9')
        throw std::invalid_argument("bad numeric literal: " + text);
      whole = whole * 10 + (text[pos] - '0');
      any_digit = true;
    }
    if (pos < text.size() && text[pos] == '.') {
      for (++pos; pos < text.size(); ++pos) {
        if (text[pos] < '0' || text[pos] > '9')
          throw std::invalid_argument("bad numeric literal: " + text);
        frac = frac * 10 + (text[pos] - '0');
        scale *= 10;
        any_digit = true;
      }
    }
    if (!any_digit) throw std::invalid_argument("bad numeric literal: " + text);
    Rational r(whole * scale + frac, scale);
    if (negative) r.num_ = -r.num_;
    return r;
  }

  /// Canonical text form: integer when possible, otherwise a minimal
  /// terminating decimal. Only values parseable by parse() are ever built
  /// from PDDL sources, so the decimal expansion always terminates.
  [[nodiscard]] std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    std::int64_t den = den_;
    int twos = 0;
    int fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) return std::to_string(num_) + "/" + std::to_string(den_);
    int digits = twos > fives ? twos : fives;
    __int128 scaled = num_;
    for (int i = 0; i < digits; ++i) scaled *= 10;
    scaled /= den_;
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string body;
    for (int i = 0; i < digits; ++i) {
      body.insert(body.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
      scaled /= 10;
    }
    std::string head = scaled == 0 ? "0" : [](auto v) {
      std::string s;
      while (v > 0) { s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10))); v /= 10; }
      return s;
    }(scaled);
    return (neg ? "-" : "") + head + "." + body;
  }

private:
  void normalize() {
    if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace lasp

template <>
struct std::hash<lasp::Rational> {
  std::size_t operator()(const lasp::Rational& r) const noexcept {
    return std::hash<std::int64_t>{}(r.num()) * 1000003U ^ std::hash<std::int64_t>{}(r.den());
  }
};
