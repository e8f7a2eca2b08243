#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dalg/error.hpp"
#include "dalg/polynomial.hpp"
#include "dalg/rational.hpp"

namespace dalg {

// Element of Q(z_1..z_n): the coefficient field of differential polynomials.
//
// Canonical form: gcd(numerator, denominator) = 1 and the denominator has
// grlex leading coefficient 1, so equality is structural. Zero is 0/1.
class RationalFunction {
 public:
  RationalFunction() : num_(0), den_(Polynomial::constant(0, 1)) {}
  explicit RationalFunction(std::size_t nvars) : num_(nvars), den_(Polynomial::constant(nvars, 1)) {}
  explicit RationalFunction(Polynomial numerator)
      : num_(std::move(numerator)), den_(Polynomial::constant(num_.nvars(), 1)) {}
  RationalFunction(Polynomial numerator, Polynomial denominator)
      : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (num_.nvars() != den_.nvars()) throw DimensionError("numerator and denominator over different variables");
    if (den_.is_zero()) throw DomainError("rational function with zero denominator");
    normalize();
  }

  static RationalFunction constant(std::size_t nvars, const Rational& c) {
    return RationalFunction(Polynomial::constant(nvars, c));
  }
  static RationalFunction variable(std::size_t nvars, std::size_t i) {
    return RationalFunction(Polynomial::variable(nvars, i));
  }

  std::size_t nvars() const noexcept { return num_.nvars(); }
  const Polynomial& numerator() const noexcept { return num_; }
  const Polynomial& denominator() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_.is_zero(); }
  bool is_polynomial() const noexcept { return den_.is_constant(); }
  bool is_constant() const noexcept { return num_.is_constant() && den_.is_constant(); }
  // Value of a constant element.
  Rational constant_value() const {
    if (!is_constant()) throw DomainError("rational function is not constant");
    return num_.constant_term();
  }

  RationalFunction operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    a.check(b);
    if (a.den_ == b.den_) {
      if (a.den_.is_constant()) return RationalFunction(a.num_ + b.num_, a.den_, Canonical{});
      return RationalFunction(a.num_ + b.num_, a.den_);
    }
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    a.check(b);
    if (a.is_zero() || b.is_zero()) return RationalFunction(a.nvars());
    if (a.den_.is_constant() && b.den_.is_constant()) return RationalFunction(a.num_ * b.num_, a.den_, Canonical{});
    // Cross-cancel so that the product is already reduced.
    Polynomial g1 = gcd(a.num_, b.den_);
    Polynomial g2 = gcd(b.num_, a.den_);
    Polynomial n1 = g1.is_constant() ? a.num_ : divide_exact(a.num_, g1);
    Polynomial d2 = g1.is_constant() ? b.den_ : divide_exact(b.den_, g1);
    Polynomial n2 = g2.is_constant() ? b.num_ : divide_exact(b.num_, g2);
    Polynomial d1 = g2.is_constant() ? a.den_ : divide_exact(a.den_, g2);
    Polynomial den = d1 * d2;
    Rational lc = den.leading_coefficient();
    Rational inv = 1 / lc;
    return RationalFunction((n1 * n2) * inv, den * inv, Canonical{});
  }

  friend RationalFunction operator*(const RationalFunction& a, const Rational& s) {
    if (s == 0) return RationalFunction(a.nvars());
    RationalFunction r = a;
    r.num_ *= s;
    return r;
  }

  RationalFunction inverse() const {
    if (is_zero()) throw DomainError("inverse of the zero rational function");
    return RationalFunction(den_, num_);
  }

  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) { return a * b.inverse(); }

  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  RationalFunction pow(unsigned k) const { return RationalFunction(num_.pow(k), den_.pow(k), Canonical{}); }

  RationalFunction derivative(std::size_t var) const {
    if (den_.is_constant()) return RationalFunction(num_.derivative(var), den_, Canonical{});
    return RationalFunction(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
  }

  Rational evaluate(std::span<const Rational> point) const {
    Rational d = den_.evaluate(point);
    if (d == 0) throw PoleError("denominator vanishes at the evaluation point");
    return num_.evaluate(point) / d;
  }

  // z_var := c, keeping the variable count; RestrictionError when the
  // denominator vanishes identically on the hyperplane.
  RationalFunction substitute(std::size_t var, const Rational& c) const {
    Polynomial d = den_.substitute(var, c);
    if (d.is_zero()) throw RestrictionError("denominator vanishes identically on z" + std::to_string(var + 1) + " = " + c.get_str());
    return RationalFunction(num_.substitute(var, c), d);
  }

  RationalFunction drop_variable(std::size_t var) const {
    return RationalFunction(num_.drop_variable(var), den_.drop_variable(var), Canonical{});
  }

  RationalFunction insert_variable(std::size_t var) const {
    return RationalFunction(num_.insert_variable(var), den_.insert_variable(var), Canonical{});
  }

  template <typename Int>
  RationalFunction linear_substitute(const std::vector<std::vector<Int>>& rows) const {
    return RationalFunction(num_.linear_substitute(rows), den_.linear_substitute(rows));
  }

 private:
  struct Canonical {};
  // Trusted constructor: only rescales by a constant denominator.
  RationalFunction(Polynomial n, Polynomial d, Canonical) : num_(std::move(n)), den_(std::move(d)) {
    if (den_.is_constant()) {
      Rational inv = 1 / den_.constant_term();
      num_ *= inv;
      den_ = Polynomial::constant(num_.nvars(), 1);
    }
  }

  void check(const RationalFunction& o) const {
    if (o.nvars() != nvars()) throw DimensionError("rational functions over different variable counts");
  }

  void normalize() {
    if (num_.is_zero()) {
      den_ = Polynomial::constant(num_.nvars(), 1);
      return;
    }
    if (!den_.is_constant()) {
      Polynomial g = gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = divide_exact(num_, g);
        den_ = divide_exact(den_, g);
      }
    }
    Rational inv = 1 / den_.leading_coefficient();
    num_ *= inv;
    den_ *= inv;
  }

  Polynomial num_;
  Polynomial den_;
};

// f with z_1 := c, as an element of Q(z_2..z_n).
inline RationalFunction restrict_hyperplane(const RationalFunction& f, const Rational& c) {
  if (f.nvars() == 0) throw DimensionError("cannot restrict a function of zero variables");
  return f.substitute(0, c).drop_variable(0);
}

inline std::string to_string(const RationalFunction& f) {
  if (f.is_polynomial()) return to_string(f.numerator());
  return "(" + to_string(f.numerator()) + ")/(" + to_string(f.denominator()) + ")";
}

}  // namespace dalg
