#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <cstdint>
#include <ostream>
#include <string>

#include "markov/base.hpp"

namespace markov {

// Exact arbitrary-precision rational, eagerly evaluated so it can serve as an
// Eigen matrix scalar (gmpxx expression templates do not mix with Eigen's).
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den) : v_(num, den) {
    require(den != 0, "rational with zero denominator");
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Parses "num/den" or "num" (arbitrary precision, base 10).
  static Rational parse(const std::string& s) {
    if (s.empty()) fail("empty rational literal");
    mpq_class q;
    try {
      q = mpq_class(s, 10);
    } catch (const std::invalid_argument&) {
      fail("malformed rational literal: '" + s + "'");
    }
    if (q.get_den() == 0) fail("rational literal with zero denominator: '" + s + "'");
    q.canonicalize();
    return Rational(q);
  }

  // Reduced decimal form, "num/den" with "/1" omitted.
  std::string str() const { return v_.get_str(); }

  double to_double() const { return v_.get_d(); }
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }
  const mpq_class& raw() const { return v_; }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ + b.v_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ - b.v_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ * b.v_)); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    require(sgn(b.v_) != 0, "rational division by zero");
    return Rational(mpq_class(a.v_ / b.v_));
  }
  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend Rational abs(const Rational& a) { return Rational(mpq_class(::abs(a.v_))); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.v_; }

 private:
  mpq_class v_;
};

}  // namespace markov

namespace Eigen {

template <>
struct NumTraits<markov::Rational> {
  using Real = markov::Rational;
  using NonInteger = markov::Rational;
  using Nested = markov::Rational;
  using Literal = markov::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 120,
    MulCost = 100
  };
  static Real epsilon() { return markov::Rational(0); }
  static Real dummy_precision() { return markov::Rational(0); }
  static int digits10() { return 0; }
};

}  // namespace Eigen
