#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dalg/error.hpp"
#include "dalg/multi_index.hpp"
#include "dalg/polynomial.hpp"
#include "dalg/rational.hpp"
#include "dalg/rational_function.hpp"

namespace dalg {

// Power series in t = z - w over Q, known exactly up to total degree N (the
// certified order). Only nonzero coefficients with |alpha| <= N are stored.
class TruncatedSeries {
 public:
  using Coefficients = std::map<MultiIndex, Rational, GrlexLess>;

  TruncatedSeries() = default;
  TruncatedSeries(std::vector<Rational> base_point, int order) : base_(std::move(base_point)), order_(order) {
    if (order_ < 0) throw ContextError("truncation order must be nonnegative");
  }
  TruncatedSeries(std::vector<Rational> base_point, int order, Coefficients coefficients)
      : TruncatedSeries(std::move(base_point), order) {
    for (auto& [a, c] : coefficients) {
      if (a.size() != nvars()) throw DimensionError("series index has wrong length");
      if (c != 0 && static_cast<int>(a.degree()) <= order_) coeffs_.emplace(a, std::move(c));
    }
  }

  static TruncatedSeries constant(std::vector<Rational> base_point, int order, const Rational& c) {
    TruncatedSeries s(std::move(base_point), order);
    if (c != 0) s.coeffs_.emplace(MultiIndex(s.nvars()), c);
    return s;
  }

  // The series t_i = z_i - w_i.
  static TruncatedSeries variable(std::vector<Rational> base_point, int order, std::size_t i) {
    TruncatedSeries s(std::move(base_point), order);
    if (order >= 1) s.coeffs_.emplace(MultiIndex::unit(s.nvars(), i), Rational(1));
    return s;
  }

  // Reads a polynomial in t (already centred at the base point).
  static TruncatedSeries from_polynomial(const Polynomial& in_t, std::vector<Rational> base_point, int order) {
    if (in_t.nvars() != base_point.size()) throw DimensionError("polynomial and base point dimensions differ");
    Coefficients c;
    for (const auto& [a, v] : in_t.terms()) c.emplace(a, v);
    return TruncatedSeries(std::move(base_point), order, std::move(c));
  }

  std::size_t nvars() const noexcept { return base_.size(); }
  int order() const noexcept { return order_; }
  const std::vector<Rational>& base_point() const noexcept { return base_; }
  const Coefficients& coefficients() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  Rational coefficient(const MultiIndex& alpha) const {
    if (alpha.size() != nvars()) throw DimensionError("series index has wrong length");
    if (static_cast<int>(alpha.degree()) > order_)
      throw ContextError("coefficient " + alpha.to_string() + " is beyond the certified order");
    auto it = coeffs_.find(alpha);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coefficient(MultiIndex(nvars())); }

  TruncatedSeries truncated(int order) const {
    if (order > order_) throw ContextError("cannot raise the certified order of a series");
    Coefficients c;
    for (const auto& [a, v] : coeffs_)
      if (static_cast<int>(a.degree()) <= order) c.emplace(a, v);
    return TruncatedSeries(base_, order, std::move(c));
  }

  Polynomial to_polynomial() const {
    Polynomial p(nvars());
    for (const auto& [a, v] : coeffs_) p.add_term(a, v);
    return p;
  }

  TruncatedSeries operator-() const {
    TruncatedSeries r = *this;
    for (auto& [a, c] : r.coeffs_) c = -c;
    return r;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_compatible(b);
    TruncatedSeries r = a;
    for (const auto& [e, c] : b.coeffs_) r.add(e, c);
    return r;
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_compatible(b);
    TruncatedSeries r(a.base_, a.order_);
    for (const auto& [ea, ca] : a.coeffs_) {
      int da = static_cast<int>(ea.degree());
      for (const auto& [eb, cb] : b.coeffs_) {
        if (da + static_cast<int>(eb.degree()) > a.order_) continue;
        r.add(ea + eb, Rational(ca * cb));
      }
    }
    return r;
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const Rational& s) {
    if (s == 0) return TruncatedSeries(a.base_, a.order_);
    TruncatedSeries r = a;
    for (auto& [e, c] : r.coeffs_) c *= s;
    return r;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.order_ == b.order_ && a.base_ == b.base_ && a.coeffs_ == b.coeffs_;
  }

  // Partial derivative in t_i; the certified order drops by one.
  TruncatedSeries derive(std::size_t i) const {
    if (i >= nvars()) throw DimensionError("derivation index out of range");
    if (order_ == 0) throw ContextError("an order-0 series has no certified derivative");
    TruncatedSeries r(base_, order_ - 1);
    for (const auto& [a, c] : coeffs_) {
      if (a[i] == 0) continue;
      std::vector<unsigned> e(a.entries().begin(), a.entries().end());
      Rational k = Rational(e[i]) * c;
      --e[i];
      r.add(MultiIndex(std::move(e)), k);
    }
    return r;
  }

  std::string to_string() const {
    std::string s = to_polynomial().is_zero() ? "0" : dalg::to_string(to_polynomial());
    return s + " + O(|t|^" + std::to_string(order_ + 1) + ")";
  }

 private:
  void add(const MultiIndex& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = coeffs_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    }
  }

  void check_compatible(const TruncatedSeries& o) const {
    if (o.nvars() != nvars()) throw DimensionError("series over different variable counts");
    if (o.base_ != base_) throw ContextError("series have different base points");
    if (o.order_ != order_) throw ContextError("series have different truncation orders");
  }

  std::vector<Rational> base_;
  int order_ = 0;
  Coefficients coeffs_;
};

inline TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) { return a * b; }
inline TruncatedSeries series_derive(const TruncatedSeries& a, std::size_t i) { return a.derive(i); }

// Multiplicative inverse; the constant term must be nonzero.
inline TruncatedSeries inverse(const TruncatedSeries& s) {
  Rational c = s.constant_term();
  if (c == 0) throw PoleError("series with zero constant term is not invertible");
  Rational inv_c = 1 / c;
  TruncatedSeries one = TruncatedSeries::constant(s.base_point(), s.order(), 1);
  // u = 1 - s/c has no constant term; 1/s = (1/c) * sum_k u^k, Horner form.
  TruncatedSeries u = one - s * inv_c;
  TruncatedSeries acc = one;
  for (int k = 0; k < s.order(); ++k) acc = one + u * acc;
  return acc * inv_c;
}

// Taylor expansion of f at w to total degree N.
inline TruncatedSeries expand_ratfunc(const RationalFunction& f, const std::vector<Rational>& w, int order) {
  if (w.size() != f.nvars()) throw DimensionError("base point dimension does not match the function");
  Polynomial den = f.denominator().shifted(w);
  if (den.constant_term() == 0) throw PoleError("denominator vanishes at the base point");
  TruncatedSeries num = TruncatedSeries::from_polynomial(f.numerator().shifted(w), w, order);
  if (f.is_polynomial()) return num;
  return num * inverse(TruncatedSeries::from_polynomial(den, w, order));
}

// Coefficient of t_1^k as a series in t_2..t_m (certified to order N - k).
inline TruncatedSeries slice_first(const TruncatedSeries& s, unsigned k) {
  if (s.nvars() == 0) throw DimensionError("cannot slice a series in zero variables");
  if (static_cast<int>(k) > s.order()) throw ContextError("slice index beyond the certified order");
  std::vector<Rational> base(s.base_point().begin() + 1, s.base_point().end());
  TruncatedSeries::Coefficients c;
  for (const auto& [a, v] : s.coefficients())
    if (a[0] == k) c.emplace(a.without(0), v);
  return TruncatedSeries(std::move(base), s.order() - static_cast<int>(k), std::move(c));
}

// Restriction to the hyperplane z_1 = w_1.
inline TruncatedSeries restrict_first(const TruncatedSeries& s) { return slice_first(s, 0); }

// phi(t_2..t_m) * t_1^k as a series in m variables with first base coordinate
// w1, certified to `order` (phi must be certified to order - k).
inline TruncatedSeries lift_first(const TruncatedSeries& phi, const Rational& w1, unsigned k, int order) {
  if (phi.order() < order - static_cast<int>(k))
    throw ContextError("slice data is not certified to the requested order");
  std::vector<Rational> base;
  base.reserve(phi.nvars() + 1);
  base.push_back(w1);
  base.insert(base.end(), phi.base_point().begin(), phi.base_point().end());
  TruncatedSeries::Coefficients c;
  for (const auto& [a, v] : phi.coefficients()) c.emplace(a.with_inserted(0, k), v);
  return TruncatedSeries(std::move(base), order, std::move(c));
}

}  // namespace dalg
