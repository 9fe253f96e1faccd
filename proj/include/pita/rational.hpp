#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pita {

// Exact rational in lowest terms, den > 0. Annotations are kept exact so
// that "sums to one" is a crisp test rather than a floating point guess.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  Rational() = default;
  Rational(int64_t n, int64_t d) : num(n), den(d) { normalize(); }

  static Rational zero() { return Rational(); }
  static Rational one() { return Rational(1, 1); }

  void normalize() {
    if (den == 0) throw std::overflow_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num * b.den + (__int128)b.num * a.den;
    __int128 d = (__int128)a.den * b.den;
    __int128 g = gcd128(n < 0 ? -n : n, d);
    n /= g; d /= g;
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("rational overflow");
    return Rational((int64_t)n, (int64_t)d);
  }

  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(-b.num, b.den);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }

  friend bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }

private:
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }
};

}  // namespace pita
