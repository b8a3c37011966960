#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtt {

using Rat = boost::rational<long long>;

inline Rat ratOf(long long n, long long d = 1) { return Rat(n, d); }

inline double toDouble(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string show(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// parses "7", "-3/4", "0.5" (decimal converted exactly)
inline Rat parseRat(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    long long n = std::stoll(s.substr(0, slash));
    long long d = std::stoll(s.substr(slash + 1));
    return Rat(n, d);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    long long whole = std::stoll(s.substr(0, dot));
    std::string frac = s.substr(dot + 1);
    long long den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    long long num = frac.empty() ? 0 : std::stoll(frac);
    bool neg = !s.empty() && s[0] == '-';
    Rat r = Rat(std::llabs(whole), 1) + Rat(num, den);
    return neg ? -r : r;
  }
  return Rat(std::stoll(s), 1);
}

// sensitivity: nonnegative rational or infinity
struct Sens {
  bool infinite = false;
  Rat value{0};

  static Sens inf() { return Sens{true, Rat(0)}; }
  static Sens of(Rat r) { return Sens{false, r}; }

  bool isZero() const { return !infinite && value == Rat(0); }

  friend Sens operator+(const Sens& a, const Sens& b) {
    if (a.infinite || b.infinite) return inf();
    return of(a.value + b.value);
  }
  friend Sens operator*(const Sens& a, const Sens& b) {
    // 0 * inf = 0, the usual Fuzz convention
    if (a.isZero() || b.isZero()) return of(Rat(0));
    if (a.infinite || b.infinite) return inf();
    return of(a.value * b.value);
  }
  friend bool operator==(const Sens& a, const Sens& b) {
    if (a.infinite != b.infinite) return false;
    return a.infinite || a.value == b.value;
  }
  friend bool operator<=(const Sens& a, const Sens& b) {
    if (b.infinite) return true;
    if (a.infinite) return false;
    return a.value <= b.value;
  }
};

inline Sens operator*(const Rat& r, const Sens& s) { return Sens::of(r) * s; }

inline std::string show(const Sens& s) { return s.infinite ? "oo" : show(s.value); }

// exact division q / s, used to synthesize the least bang scale
inline Sens sensDiv(const Sens& q, const Sens& s) {
  if (q.isZero()) return Sens::of(Rat(0));
  if (s.infinite) return Sens::of(Rat(0));  // infinite budget absorbs any use
  if (s.isZero()) return Sens::inf();       // caller must treat as overrun
  if (q.infinite) return Sens::inf();
  return Sens::of(q.value / s.value);
}

}  // namespace dtt
