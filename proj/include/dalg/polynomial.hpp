#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dalg/error.hpp"
#include "dalg/multi_index.hpp"
#include "dalg/rational.hpp"

namespace dalg {

// Sparse multivariate polynomial over Q in z_1..z_n (0-based variable
// indices in the API). Zero coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, Rational, GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}
  Polynomial(std::size_t nvars, Terms terms) : nvars_(nvars), terms_(std::move(terms)) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first.size() != nvars_) throw DimensionError("monomial length does not match variable count");
      it = it->second == 0 ? terms_.erase(it) : std::next(it);
    }
  }

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_.emplace(MultiIndex(nvars), c);
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t i) {
    Polynomial p(nvars);
    p.terms_.emplace(MultiIndex::unit(nvars, i), Rational(1));
    return p;
  }

  static Polynomial monomial(const MultiIndex& alpha, const Rational& c) {
    Polynomial p(alpha.size());
    if (c != 0) p.terms_.emplace(alpha, c);
    return p;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_zero()); }

  Rational constant_term() const {
    auto it = terms_.find(MultiIndex(nvars_));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  // Leading term under grlex; the zero polynomial has none.
  const MultiIndex& leading_monomial() const {
    if (is_zero()) throw DomainError("zero polynomial has no leading monomial");
    return terms_.rbegin()->first;
  }
  const Rational& leading_coefficient() const {
    if (is_zero()) throw DomainError("zero polynomial has no leading coefficient");
    return terms_.rbegin()->second;
  }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, a.degree());
    return d;
  }

  unsigned degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, a[var]);
    return d;
  }

  bool involves(std::size_t var) const { return degree_in(var) > 0; }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& [a, c] : r.terms_) c = -c;
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check(o);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check(b);
    Polynomial r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, Rational(ca * cb));
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(nvars_, 1);
    Polynomial base = *this;
    while (k) {
      if (k & 1u) r = r * base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return r;
  }

  Polynomial derivative(std::size_t var) const {
    if (var >= nvars_) throw DimensionError("derivative variable out of range");
    Polynomial r(nvars_);
    for (const auto& [a, c] : terms_) {
      if (a[var] == 0) continue;
      std::vector<unsigned> e(a.entries().begin(), a.entries().end());
      Rational k = Rational(e[var]) * c;
      --e[var];
      r.add_term(MultiIndex(std::move(e)), k);
    }
    return r;
  }

  Rational evaluate(std::span<const Rational> point) const {
    if (point.size() != nvars_) throw DimensionError("evaluation point has wrong dimension");
    Rational sum = 0;
    for (const auto& [a, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < nvars_; ++i) {
        for (unsigned k = 0; k < a[i]; ++k) t *= point[i];
      }
      sum += t;
    }
    return sum;
  }

  // z_var := c; the variable count is unchanged.
  Polynomial substitute(std::size_t var, const Rational& c) const {
    if (var >= nvars_) throw DimensionError("substitution variable out of range");
    Polynomial r(nvars_);
    for (const auto& [a, coeff] : terms_) {
      Rational t = coeff;
      for (unsigned k = 0; k < a[var]; ++k) t *= c;
      std::vector<unsigned> e(a.entries().begin(), a.entries().end());
      e[var] = 0;
      r.add_term(MultiIndex(std::move(e)), t);
    }
    return r;
  }

  // Removes a variable that does not occur, renumbering the later ones.
  Polynomial drop_variable(std::size_t var) const {
    if (var >= nvars_) throw DimensionError("variable out of range");
    Polynomial r(nvars_ - 1);
    for (const auto& [a, c] : terms_) {
      if (a[var] != 0) throw DomainError("cannot drop a variable that occurs in the polynomial");
      r.terms_.emplace(a.without(var), c);
    }
    return r;
  }

  // Inserts a fresh variable at position var (it does not occur).
  Polynomial insert_variable(std::size_t var) const {
    Polynomial r(nvars_ + 1);
    for (const auto& [a, c] : terms_) r.terms_.emplace(a.with_inserted(var, 0), c);
    return r;
  }

  // p(z + shift): the Taylor re-centring used to expand at a base point.
  Polynomial shifted(std::span<const Rational> shift) const {
    if (shift.size() != nvars_) throw DimensionError("shift has wrong dimension");
    std::vector<Polynomial> linear;
    linear.reserve(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) linear.push_back(variable(nvars_, i) + constant(nvars_, shift[i]));
    return compose(linear);
  }

  // z_j := sum_k rows[j][k] z_k.
  template <typename Int>
  Polynomial linear_substitute(const std::vector<std::vector<Int>>& rows) const {
    if (rows.size() != nvars_) throw DimensionError("substitution matrix has wrong row count");
    std::vector<Polynomial> images;
    for (const auto& row : rows) {
      if (row.size() != nvars_) throw DimensionError("substitution matrix has wrong column count");
      Polynomial img(nvars_);
      for (std::size_t k = 0; k < nvars_; ++k)
        if (row[k] != 0) img += variable(nvars_, k) * Rational(Integer(static_cast<long>(row[k])));
      images.push_back(std::move(img));
    }
    return compose(images);
  }

  // z_j := images[j]; all images share one variable count.
  Polynomial compose(const std::vector<Polynomial>& images) const {
    if (images.size() != nvars_) throw DimensionError("composition needs one image per variable");
    std::size_t target = images.empty() ? 0 : images.front().nvars();
    for (const auto& im : images)
      if (im.nvars() != target) throw DimensionError("composition images have different variable counts");
    std::vector<std::vector<Polynomial>> powers(nvars_);
    Polynomial r(target);
    for (const auto& [a, c] : terms_) {
      Polynomial t = constant(target, c);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (a[i] == 0) continue;
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(constant(target, 1));
        while (cache.size() <= a[i]) cache.push_back(cache.back() * images[i]);
        t = t * cache[a[i]];
      }
      r += t;
    }
    return r;
  }

  void add_term(const MultiIndex& a, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

 private:
  void check(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw DimensionError("polynomials over different variable counts");
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

// Univariate views with respect to one variable; coefficients do not involve it.
namespace detail {

inline std::vector<Polynomial> coefficients_in(const Polynomial& p, std::size_t var) {
  std::vector<Polynomial> out(p.degree_in(var) + 1, Polynomial(p.nvars()));
  for (const auto& [a, c] : p.terms()) {
    std::vector<unsigned> e(a.entries().begin(), a.entries().end());
    unsigned k = e[var];
    e[var] = 0;
    out[k].add_term(MultiIndex(std::move(e)), c);
  }
  return out;
}

inline Polynomial times_variable_power(const Polynomial& p, std::size_t var, unsigned k) {
  return p * Polynomial::monomial(MultiIndex::unit(p.nvars(), var, k), 1);
}

inline int main_variable(const Polynomial& p) {
  int v = -1;
  for (const auto& [a, c] : p.terms())
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] > 0) v = std::max(v, static_cast<int>(i));
  return v;
}

inline Polynomial monic(const Polynomial& p) {
  if (p.is_zero()) return p;
  Rational inv = 1 / p.leading_coefficient();
  return p * inv;
}

}  // namespace detail

// Exact multivariate division; throws DomainError when b does not divide a.
inline Polynomial divide_exact(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw DomainError("division by the zero polynomial");
  if (a.nvars() != b.nvars()) throw DimensionError("polynomials over different variable counts");
  Polynomial q(a.nvars());
  Polynomial r = a;
  const MultiIndex& lb = b.leading_monomial();
  Rational inv = 1 / b.leading_coefficient();
  while (!r.is_zero()) {
    const MultiIndex& lr = r.leading_monomial();
    if (!lb.divides(lr)) throw DomainError("inexact polynomial division");
    Polynomial t = Polynomial::monomial(lr - lb, Rational(r.leading_coefficient() * inv));
    q += t;
    r -= t * b;
  }
  return q;
}

inline Polynomial gcd(const Polynomial& a, const Polynomial& b);

namespace detail {

// Content with respect to var: gcd of the coefficients of p viewed in var.
inline Polynomial content_in(const Polynomial& p, std::size_t var) {
  Polynomial g(p.nvars());
  for (const auto& c : coefficients_in(p, var)) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

inline Polynomial primitive_part_in(const Polynomial& p, std::size_t var) {
  if (p.is_zero()) return p;
  Polynomial c = content_in(p, var);
  return monic(c.is_constant() ? p : divide_exact(p, c));
}

// Pseudo-remainder of a by b in var, up to a power of lc_var(b).
inline Polynomial pseudo_remainder(Polynomial a, const Polynomial& b, std::size_t var) {
  unsigned db = b.degree_in(var);
  Polynomial lb = coefficients_in(b, var).back();
  while (!a.is_zero() && a.degree_in(var) >= db) {
    unsigned da = a.degree_in(var);
    Polynomial la = coefficients_in(a, var).back();
    a = lb * a - times_variable_power(la, var, da - db) * b;
  }
  return a;
}

}  // namespace detail

// Greatest common divisor over Q, normalized to leading coefficient 1 under
// grlex (gcd(0, 0) = 0). Recursive primitive PRS on the main variable.
inline Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.nvars() != b.nvars()) throw DimensionError("polynomials over different variable counts");
  if (a.is_zero()) return detail::monic(b);
  if (b.is_zero()) return detail::monic(a);
  if (a.is_constant() || b.is_constant()) return Polynomial::constant(a.nvars(), 1);
  int va = detail::main_variable(a);
  int vb = detail::main_variable(b);
  auto v = static_cast<std::size_t>(std::max(va, vb));
  if (!a.involves(v)) return gcd(a, detail::content_in(b, v));
  if (!b.involves(v)) return gcd(detail::content_in(a, v), b);

  Polynomial ca = detail::content_in(a, v);
  Polynomial cb = detail::content_in(b, v);
  Polynomial c = gcd(ca, cb);
  Polynomial p = detail::primitive_part_in(a, v);
  Polynomial q = detail::primitive_part_in(b, v);
  if (p.degree_in(v) < q.degree_in(v)) std::swap(p, q);
  while (true) {
    Polynomial r = detail::pseudo_remainder(p, q, v);
    if (r.is_zero()) break;
    if (r.degree_in(v) == 0) {
      q = Polynomial::constant(a.nvars(), 1);
      break;
    }
    p = std::move(q);
    q = detail::primitive_part_in(r, v);
  }
  return detail::monic(c * detail::primitive_part_in(q, v));
}

// Human/grammar-readable form using z1..zn, highest grlex term first.
inline std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [a, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "z" + std::to_string(i + 1);
      if (a[i] > 1) mono += "^" + std::to_string(a[i]);
    }
    if (mono.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += mono;
    } else {
      out += mag.get_str() + "*" + mono;
    }
  }
  return out;
}

}  // namespace dalg
