#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dalg/error.hpp"
#include "dalg/multi_index.hpp"
#include "dalg/rational.hpp"
#include "dalg/rational_function.hpp"
#include "dalg/series.hpp"

namespace dalg {

// delta^alpha x_j. Ordered by unknown, then grlex on the index.
struct DerivativeVar {
  std::size_t unknown = 0;
  MultiIndex index;

  std::size_t order() const { return index.degree(); }

  friend bool operator==(const DerivativeVar&, const DerivativeVar&) = default;
  friend std::strong_ordering operator<=>(const DerivativeVar& a, const DerivativeVar& b) {
    if (auto c = a.unknown <=> b.unknown; c != 0) return c;
    return grlex_compare(a.index, b.index);
  }
};

// Product of derivative variables with positive exponents, factors sorted.
class DiffMonomial {
 public:
  using Factor = std::pair<DerivativeVar, unsigned>;

  DiffMonomial() = default;
  explicit DiffMonomial(const DerivativeVar& v, unsigned exponent = 1) {
    if (exponent) factors_.emplace_back(v, exponent);
  }

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  bool is_one() const noexcept { return factors_.empty(); }

  unsigned degree_in(const DerivativeVar& v) const {
    auto it = find(v);
    return it == factors_.end() ? 0 : it->second;
  }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& f : factors_) d += f.second;
    return d;
  }

  // This monomial with the power of v replaced by `exponent`.
  DiffMonomial with_exponent(const DerivativeVar& v, unsigned exponent) const {
    DiffMonomial r = *this;
    auto it = std::lower_bound(r.factors_.begin(), r.factors_.end(), v,
                               [](const Factor& f, const DerivativeVar& x) { return f.first < x; });
    if (it != r.factors_.end() && it->first == v) {
      if (exponent == 0)
        r.factors_.erase(it);
      else
        it->second = exponent;
    } else if (exponent) {
      r.factors_.insert(it, Factor{v, exponent});
    }
    return r;
  }

  friend DiffMonomial operator*(const DiffMonomial& a, const DiffMonomial& b) {
    DiffMonomial r;
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() || j != b.factors_.end()) {
      if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
        r.factors_.push_back(*i++);
      } else if (i == a.factors_.end() || j->first < i->first) {
        r.factors_.push_back(*j++);
      } else {
        r.factors_.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    return r;
  }

  friend bool operator==(const DiffMonomial&, const DiffMonomial&) = default;
  friend bool operator<(const DiffMonomial& a, const DiffMonomial& b) { return a.factors_ < b.factors_; }

 private:
  std::vector<Factor>::const_iterator find(const DerivativeVar& v) const {
    auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                               [](const Factor& f, const DerivativeVar& x) { return f.first < x; });
    return (it != factors_.end() && it->first == v) ? it : factors_.end();
  }

  std::vector<Factor> factors_;
};

// Polynomial in finitely many derivative variables delta^alpha x_j
// (m derivations, n unknowns) with coefficients in Q(z_1..z_m).
class DiffPoly {
 public:
  using Terms = std::map<DiffMonomial, RationalFunction>;

  DiffPoly() = default;
  DiffPoly(std::size_t derivations, std::size_t unknowns) : m_(derivations), n_(unknowns) {}

  static DiffPoly constant(std::size_t derivations, std::size_t unknowns, const RationalFunction& c) {
    DiffPoly p(derivations, unknowns);
    if (c.nvars() != derivations) throw DimensionError("coefficient variable count must equal the derivation count");
    if (!c.is_zero()) p.terms_.emplace(DiffMonomial{}, c);
    return p;
  }
  static DiffPoly constant(std::size_t derivations, std::size_t unknowns, const Rational& c) {
    return constant(derivations, unknowns, RationalFunction::constant(derivations, c));
  }

  static DiffPoly variable(std::size_t derivations, std::size_t unknowns, const DerivativeVar& v) {
    DiffPoly p(derivations, unknowns);
    p.check_var(v);
    p.terms_.emplace(DiffMonomial(v), RationalFunction::constant(derivations, 1));
    return p;
  }

  // delta^alpha x_j
  static DiffPoly variable(std::size_t derivations, std::size_t unknowns, std::size_t unknown, MultiIndex alpha) {
    return variable(derivations, unknowns, DerivativeVar{unknown, std::move(alpha)});
  }

  std::size_t derivations() const noexcept { return m_; }
  std::size_t unknowns() const noexcept { return n_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  // True when no derivative variable occurs (an element of the coefficient field).
  bool is_constant() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }

  RationalFunction constant_coefficient() const {
    auto it = terms_.find(DiffMonomial{});
    return it == terms_.end() ? RationalFunction(m_) : it->second;
  }

  std::set<DerivativeVar> variables() const {
    std::set<DerivativeVar> vars;
    for (const auto& [mono, c] : terms_)
      for (const auto& f : mono.factors()) vars.insert(f.first);
    return vars;
  }

  // Largest |alpha| among occurring variables; nullopt for constants.
  std::optional<unsigned> max_order() const {
    std::optional<unsigned> r;
    for (const auto& [mono, c] : terms_)
      for (const auto& f : mono.factors()) r = std::max(r.value_or(0), static_cast<unsigned>(f.first.order()));
    return r;
  }

  unsigned degree_in(const DerivativeVar& v) const {
    unsigned d = 0;
    for (const auto& [mono, c] : terms_) d = std::max(d, mono.degree_in(v));
    return d;
  }

  DiffPoly operator-() const {
    DiffPoly r = *this;
    for (auto& [mono, c] : r.terms_) c = -c;
    return r;
  }

  DiffPoly& operator+=(const DiffPoly& o) {
    check(o);
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
  }
  DiffPoly& operator-=(const DiffPoly& o) {
    check(o);
    for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
    return *this;
  }

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }

  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    a.check(b);
    DiffPoly r(a.m_, a.n_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  friend DiffPoly operator*(const DiffPoly& a, const RationalFunction& s) {
    DiffPoly r(a.m_, a.n_);
    if (s.is_zero()) return r;
    for (const auto& [mono, c] : a.terms_) r.terms_.emplace(mono, c * s);
    return r;
  }
  friend DiffPoly operator*(const RationalFunction& s, const DiffPoly& a) { return a * s; }
  friend DiffPoly operator*(const DiffPoly& a, const Rational& s) {
    return a * RationalFunction::constant(a.m_, s);
  }

  DiffPoly& operator*=(const DiffPoly& o) { return *this = *this * o; }

  friend bool operator==(const DiffPoly& a, const DiffPoly& b) {
    return a.m_ == b.m_ && a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  DiffPoly pow(unsigned k) const {
    DiffPoly r = constant(m_, n_, 1);
    DiffPoly base = *this;
    while (k) {
      if (k & 1u) r = r * base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return r;
  }

  // P viewed as a univariate polynomial in v: result[e] is the coefficient of v^e.
  std::vector<DiffPoly> coefficients_in(const DerivativeVar& v) const {
    std::vector<DiffPoly> out(degree_in(v) + 1, DiffPoly(m_, n_));
    for (const auto& [mono, c] : terms_) {
      unsigned e = mono.degree_in(v);
      out[e].add_term(mono.with_exponent(v, 0), c);
    }
    return out;
  }

  // Formal partial derivative with respect to one derivative variable.
  DiffPoly partial(const DerivativeVar& v) const {
    DiffPoly r(m_, n_);
    for (const auto& [mono, c] : terms_) {
      unsigned e = mono.degree_in(v);
      if (e == 0) continue;
      r.add_term(mono.with_exponent(v, e - 1), c * Rational(e));
    }
    return r;
  }

  // Simultaneous substitution of derivative variables by polynomials; the
  // images may live in another context with the same derivation count.
  template <typename ImageFn>
  DiffPoly substitute(ImageFn&& image, std::size_t target_unknowns) const {
    DiffPoly r(m_, target_unknowns);
    std::map<DerivativeVar, std::vector<DiffPoly>> powers;
    for (const auto& [mono, c] : terms_) {
      DiffPoly t = constant(m_, target_unknowns, c);
      for (const auto& [v, e] : mono.factors()) {
        auto& cache = powers[v];
        if (cache.empty()) {
          cache.push_back(constant(m_, target_unknowns, 1));
          cache.push_back(image(v));
        }
        while (cache.size() <= e) cache.push_back(cache.back() * cache[1]);
        t = t * cache[e];
      }
      r += t;
    }
    return r;
  }

  DiffPoly substitute(const DerivativeVar& v, const DiffPoly& value) const {
    check(value);
    return substitute(
        [&](const DerivativeVar& w) { return w == v ? value : variable(m_, n_, w); }, n_);
  }

  // Maps each coefficient through f (e.g. a change of coordinates).
  template <typename CoefficientFn>
  DiffPoly map_coefficients(CoefficientFn&& f) const {
    DiffPoly r(m_, n_);
    for (const auto& [mono, c] : terms_) r.add_term(mono, f(c));
    return r;
  }

  // Moves unknown indices through `to` into a context with `unknowns` unknowns.
  DiffPoly relabel_unknowns(std::size_t unknowns, const std::vector<std::size_t>& to) const {
    if (to.size() != n_) throw DimensionError("relabelling needs one target per unknown");
    return substitute(
        [&](const DerivativeVar& w) { return variable(m_, unknowns, DerivativeVar{to.at(w.unknown), w.index}); },
        unknowns);
  }

  void add_term(const DiffMonomial& mono, const RationalFunction& c) {
    if (c.is_zero()) return;
    if (c.nvars() != m_) throw DimensionError("coefficient variable count must equal the derivation count");
    auto [it, inserted] = terms_.try_emplace(mono, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  void check_var(const DerivativeVar& v) const {
    if (v.unknown >= n_) throw DimensionError("unknown index out of range");
    if (v.index.size() != m_) throw DimensionError("derivative index length must equal the derivation count");
  }

 private:
  void check(const DiffPoly& o) const {
    if (o.m_ != m_ || o.n_ != n_) throw ContextError("differential polynomials from different contexts");
  }

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  Terms terms_;
};

// delta_i P by the Leibniz rule; coefficients are differentiated in z_i and
// delta^alpha x_j maps to delta^(alpha + e_i) x_j. Index i is 0-based.
inline DiffPoly dp_derive(const DiffPoly& p, std::size_t i) {
  if (i >= p.derivations()) throw DimensionError("derivation index out of range");
  DiffPoly r(p.derivations(), p.unknowns());
  for (const auto& [mono, c] : p.terms()) {
    r.add_term(mono, c.derivative(i));
    for (const auto& [v, e] : mono.factors()) {
      DerivativeVar dv{v.unknown, v.index.plus_unit(i)};
      DiffMonomial reduced = mono.with_exponent(v, e - 1);
      r.add_term(reduced * DiffMonomial(dv), c * Rational(e));
    }
  }
  return r;
}

// delta^alpha P.
inline DiffPoly dp_derive(const DiffPoly& p, const MultiIndex& alpha) {
  if (alpha.size() != p.derivations()) throw DimensionError("derivative index length must equal the derivation count");
  DiffPoly r = p;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (unsigned k = 0; k < alpha[i]; ++k) r = dp_derive(r, i);
  return r;
}

// Grlex-largest derivative of unknown j occurring in P.
inline DerivativeVar leader(const DiffPoly& p, std::size_t j = 0) {
  std::optional<DerivativeVar> best;
  for (const auto& v : p.variables())
    if (v.unknown == j && (!best || *best < v)) best = v;
  if (!best) throw NoLeaderError("polynomial contains no derivative of unknown " + std::to_string(j + 1));
  return *best;
}

inline DiffPoly separant(const DiffPoly& p, std::size_t j = 0) { return p.partial(leader(p, j)); }

inline bool is_pure_first(const MultiIndex& alpha) {
  for (std::size_t i = 1; i < alpha.size(); ++i)
    if (alpha[i] != 0) return false;
  return true;
}

struct RemarkStep {
  DiffPoly separant;
  DiffPoly q;
  unsigned order = 0;  // r, with leader delta_1^r x
};

// For P with leader delta_1^r x: delta_1 P = sep * delta_1^(r+1) x - q, where q
// only involves derivatives grlex-below (r+1, 0, ..., 0).
inline RemarkStep eqremark_step(const DiffPoly& p, std::size_t j = 0) {
  if (p.derivations() == 0) throw NotIntegralError("no derivations: the relation has no delta_1 leader");
  DerivativeVar lead = leader(p, j);
  if (!is_pure_first(lead.index))
    throw NotIntegralError("leader " + lead.index.to_string() + " is not a pure delta_1 derivative");
  unsigned r = lead.index[0];
  DiffPoly sep = p.partial(lead);
  DerivativeVar next{j, lead.index.plus_unit(0)};
  DiffPoly d1 = dp_derive(p, 0);
  DiffPoly q = sep * DiffPoly::variable(p.derivations(), p.unknowns(), next) - d1;
  if (q.degree_in(next) != 0) throw DomainError("prolongation identity is not linear in the new leader");
  return RemarkStep{std::move(sep), std::move(q), r};
}

namespace detail {

inline void check_jets(const std::vector<TruncatedSeries>& jets, std::size_t m, std::size_t n) {
  if (jets.size() != n) throw DimensionError("need exactly one jet per unknown");
  for (const auto& s : jets) {
    if (s.nvars() != m) throw DimensionError("jet variable count must equal the derivation count");
    if (s.base_point() != jets.front().base_point()) throw ContextError("jets have different base points");
  }
}

// Evaluation where unknown j is certified to jets[j].order(); the result is
// certified to the smallest order - |alpha| over occurring variables (or the
// smallest jet order when P is constant).
inline TruncatedSeries evaluate_mixed(const DiffPoly& p, const std::vector<TruncatedSeries>& jets) {
  check_jets(jets, p.derivations(), p.unknowns());
  if (jets.empty()) throw ContextError("cannot evaluate without a base point");
  const auto& w = jets.front().base_point();
  auto vars = p.variables();
  int out = std::numeric_limits<int>::max();
  if (vars.empty())
    for (const auto& s : jets) out = std::min(out, s.order());
  for (const auto& v : vars) out = std::min(out, jets[v.unknown].order() - static_cast<int>(v.order()));
  if (out < 0) throw ContextError("jets are not certified to the derivative orders occurring in the polynomial");

  std::map<DerivativeVar, TruncatedSeries> derived;
  for (const auto& v : vars) {
    TruncatedSeries s = jets[v.unknown];
    for (std::size_t i = 0; i < v.index.size(); ++i)
      for (unsigned k = 0; k < v.index[i]; ++k) s = s.derive(i);
    derived.emplace(v, s.truncated(out));
  }
  TruncatedSeries sum(w, out);
  for (const auto& [mono, c] : p.terms()) {
    TruncatedSeries t = expand_ratfunc(c, w, out);
    for (const auto& [v, e] : mono.factors())
      for (unsigned k = 0; k < e; ++k) t = t * derived.at(v);
    sum = sum + t;
  }
  return sum;
}

}  // namespace detail

// Substitutes series for the unknowns (and their derivatives) and expands the
// coefficients at the shared base point. The result is certified to
// N - (largest derivative order occurring in P).
inline TruncatedSeries evaluate_jet(const DiffPoly& p, const std::vector<TruncatedSeries>& jets) {
  detail::check_jets(jets, p.derivations(), p.unknowns());
  for (const auto& s : jets)
    if (s.order() != jets.front().order()) throw ContextError("jets have different truncation orders");
  return detail::evaluate_mixed(p, jets);
}

// Checks that P witnesses Delta-integrality at the witness jet: leader
// delta_1^r x, P vanishes to its certified order and the separant does not.
inline bool is_integral(const DiffPoly& p, const TruncatedSeries& witness) {
  if (p.unknowns() != 1 || p.derivations() == 0) return false;
  try {
    DerivativeVar lead = leader(p, 0);
    if (!is_pure_first(lead.index)) return false;
    if (!evaluate_jet(p, {witness}).is_zero()) return false;
    return !evaluate_jet(p.partial(lead), {witness}).is_zero();
  } catch (const Error&) {
    return false;
  }
}

// Quotient of differential polynomials; the denominator is nonzero. When the
// denominator is an element of the coefficient field it is folded into the
// numerator, so polynomials always carry denominator 1.
class DiffRationalFunction {
 public:
  DiffRationalFunction() = default;
  explicit DiffRationalFunction(DiffPoly numerator)
      : num_(std::move(numerator)), den_(DiffPoly::constant(num_.derivations(), num_.unknowns(), 1)) {}
  DiffRationalFunction(DiffPoly numerator, DiffPoly denominator)
      : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (den_.is_zero()) throw DomainError("differential rational function with zero denominator");
    if (num_.derivations() != den_.derivations() || num_.unknowns() != den_.unknowns())
      throw ContextError("numerator and denominator from different contexts");
    if (num_.is_zero()) {
      den_ = DiffPoly::constant(num_.derivations(), num_.unknowns(), 1);
    } else if (den_.is_constant()) {
      num_ = num_ * den_.constant_coefficient().inverse();
      den_ = DiffPoly::constant(num_.derivations(), num_.unknowns(), 1);
    }
  }

  const DiffPoly& numerator() const noexcept { return num_; }
  const DiffPoly& denominator() const noexcept { return den_; }
  bool is_polynomial() const { return den_.is_constant(); }
  std::size_t derivations() const noexcept { return num_.derivations(); }
  std::size_t unknowns() const noexcept { return num_.unknowns(); }

  std::set<DerivativeVar> variables() const {
    auto v = num_.variables();
    auto d = den_.variables();
    v.insert(d.begin(), d.end());
    return v;
  }

  friend DiffRationalFunction operator+(const DiffRationalFunction& a, const DiffRationalFunction& b) {
    if (a.den_ == b.den_) return DiffRationalFunction(a.num_ + b.num_, a.den_);
    return DiffRationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  DiffRationalFunction operator-() const { return DiffRationalFunction(-num_, den_); }
  friend DiffRationalFunction operator-(const DiffRationalFunction& a, const DiffRationalFunction& b) {
    return a + (-b);
  }
  friend DiffRationalFunction operator*(const DiffRationalFunction& a, const DiffRationalFunction& b) {
    return DiffRationalFunction(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend DiffRationalFunction operator/(const DiffRationalFunction& a, const DiffRationalFunction& b) {
    if (b.num_.is_zero()) throw DomainError("division by zero");
    return DiffRationalFunction(a.num_ * b.den_, a.den_ * b.num_);
  }
  DiffRationalFunction pow(unsigned k) const { return DiffRationalFunction(num_.pow(k), den_.pow(k)); }

  friend bool operator==(const DiffRationalFunction& a, const DiffRationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  DiffPoly num_;
  DiffPoly den_;
};

inline DiffRationalFunction dp_derive(const DiffRationalFunction& f, std::size_t i) {
  const auto& n = f.numerator();
  const auto& d = f.denominator();
  if (d.is_constant()) return DiffRationalFunction(dp_derive(n, i));
  return DiffRationalFunction(dp_derive(n, i) * d - n * dp_derive(d, i), d * d);
}

// Jet evaluation of a quotient; the denominator must not vanish at the base point.
inline TruncatedSeries evaluate_jet(const DiffRationalFunction& f, const std::vector<TruncatedSeries>& jets) {
  TruncatedSeries num = detail::evaluate_mixed(f.numerator(), jets);
  if (f.is_polynomial()) return num;
  TruncatedSeries den = detail::evaluate_mixed(f.denominator(), jets);
  int order = std::min(num.order(), den.order());
  if (den.constant_term() == 0) throw DenominatorVanishesError("denominator vanishes on the jet at the base point");
  return num.truncated(order) * inverse(den.truncated(order));
}

}  // namespace dalg
