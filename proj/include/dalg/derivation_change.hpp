#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dalg/diffpoly.hpp"
#include "dalg/error.hpp"
#include "dalg/multi_index.hpp"
#include "dalg/polynomial.hpp"
#include "dalg/rational.hpp"
#include "dalg/series.hpp"

namespace dalg {

// Integer parameters (lambda_2, ..., lambda_m) of the change
// D_1 = delta_1, D_j = delta_j + lambda_j delta_1.
struct LambdaVector {
  std::vector<std::int64_t> values;

  friend bool operator==(const LambdaVector&, const LambdaVector&) = default;
};

// Unimodular m x m integer matrix M defining new derivations
// delta*_i = sum_j M_ij delta_j.
class DerivationMatrix {
 public:
  using Rows = std::vector<std::vector<std::int64_t>>;

  explicit DerivationMatrix(Rows rows) : rows_(std::move(rows)) {
    for (const auto& r : rows_)
      if (r.size() != rows_.size()) throw MatrixError("derivation matrix must be square");
    Integer det = determinant();
    if (det != 1 && det != -1) throw MatrixError("derivation matrix is not invertible over Z (det = " + det.get_str() + ")");
  }

  static DerivationMatrix identity(std::size_t m) {
    Rows rows(m, std::vector<std::int64_t>(m, 0));
    for (std::size_t i = 0; i < m; ++i) rows[i][i] = 1;
    return DerivationMatrix(std::move(rows));
  }

  // I + sum_{j>=2} lambda_j E_{j1}; determinant 1.
  static DerivationMatrix from_lambda(const LambdaVector& lambda) {
    std::size_t m = lambda.values.size() + 1;
    Rows rows(m, std::vector<std::int64_t>(m, 0));
    for (std::size_t i = 0; i < m; ++i) rows[i][i] = 1;
    for (std::size_t j = 1; j < m; ++j) rows[j][0] = lambda.values[j - 1];
    return DerivationMatrix(std::move(rows));
  }

  std::size_t size() const noexcept { return rows_.size(); }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return rows_.at(i).at(j); }
  const Rows& rows() const noexcept { return rows_; }

  Rows transposed() const {
    Rows t(size(), std::vector<std::int64_t>(size()));
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) t[j][i] = rows_[i][j];
    return t;
  }

  Integer determinant() const {
    std::vector<std::vector<Rational>> a = as_rational();
    std::size_t n = size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (p < n && a[p][c] == 0) ++p;
      if (p == n) return 0;
      if (p != c) {
        std::swap(a[p], a[c]);
        det = -det;
      }
      det *= a[c][c];
      for (std::size_t r = c + 1; r < n; ++r) {
        if (a[r][c] == 0) continue;
        Rational f = a[r][c] / a[c][c];
        for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      }
    }
    return det.get_num();
  }

  DerivationMatrix inverse() const {
    std::size_t n = size();
    std::vector<std::vector<Rational>> a = as_rational();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (a[p][c] == 0) ++p;
      std::swap(a[p], a[c]);
      std::swap(inv[p], inv[c]);
      Rational s = 1 / a[c][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[c][k] *= s;
        inv[c][k] *= s;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c || a[r][c] == 0) continue;
        Rational f = a[r][c];
        for (std::size_t k = 0; k < n; ++k) {
          a[r][k] -= f * a[c][k];
          inv[r][k] -= f * inv[c][k];
        }
      }
    }
    Rows out(n, std::vector<std::int64_t>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i][j] = inv[i][j].get_num().get_si();
    return DerivationMatrix(std::move(out));
  }

  friend bool operator==(const DerivationMatrix&, const DerivationMatrix&) = default;

 private:
  std::vector<std::vector<Rational>> as_rational() const {
    std::vector<std::vector<Rational>> a(size(), std::vector<Rational>(size()));
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) a[i][j] = Rational(Integer(static_cast<long>(rows_[i][j])));
    return a;
  }

  Rows rows_;
};

// Rewrites P in the derivations delta* = M delta. Each delta^alpha x_j is
// expanded through delta_i = sum_k (M^-1)_ik delta*_k, and coefficients move
// to the coordinates z = M^T z* in which delta*_k acts as d/dz*_k. The
// result is again a DiffPoly whose dp_derive(., k) is delta*_k.
inline DiffPoly transform(const DiffPoly& p, const DerivationMatrix& m) {
  std::size_t dim = p.derivations();
  if (m.size() != dim) throw DimensionError("matrix size must equal the derivation count");
  DerivationMatrix inv = m.inverse();
  std::vector<Polynomial> old_in_new;
  for (std::size_t i = 0; i < dim; ++i) {
    Polynomial l(dim);
    for (std::size_t k = 0; k < dim; ++k)
      if (inv(i, k) != 0) l += Polynomial::variable(dim, k) * Rational(Integer(static_cast<long>(inv(i, k))));
    old_in_new.push_back(std::move(l));
  }
  auto image = [&](const DerivativeVar& v) {
    Polynomial op = Polynomial::constant(dim, 1);
    for (std::size_t i = 0; i < dim; ++i) op = op * old_in_new[i].pow(v.index[i]);
    DiffPoly out(dim, p.unknowns());
    for (const auto& [beta, c] : op.terms())
      out += DiffPoly::variable(dim, p.unknowns(), v.unknown, beta) * c;
    return out;
  };
  auto coordinates = m.transposed();
  return p.substitute(image, p.unknowns()).map_coefficients([&](const RationalFunction& c) {
    return c.is_constant() ? c : c.linear_substitute(coordinates);
  });
}

// s(z) -> s(M^T z*): the partial derivatives of the result in z* are the
// delta*-derivatives of s. Base point must be the origin.
inline TruncatedSeries coordinate_change_series(const TruncatedSeries& s, const DerivationMatrix& m) {
  if (m.size() != s.nvars()) throw DimensionError("matrix size must equal the series variable count");
  for (const auto& w : s.base_point())
    if (w != 0) throw ContextError("coordinate change requires a series centred at the origin");
  Polynomial moved = s.to_polynomial().linear_substitute(m.transposed());
  return TruncatedSeries::from_polynomial(moved, s.base_point(), s.order());
}

// Separant of f with respect to D_1^r x as a polynomial in symbolic
// lambda_2..lambda_m: the coefficient of lambda^q' (q' = (q_2..q_m)) is
// (-1)^|q'| df/d(delta^q x) with q_1 = r - |q'|.
struct LambdaSeparant {
  std::size_t derivations = 0;
  unsigned order = 0;
  std::map<MultiIndex, DiffPoly, GrlexLess> terms;

  DiffPoly evaluate(const LambdaVector& lambda) const {
    if (lambda.values.size() + 1 != derivations) throw DimensionError("lambda vector has wrong length");
    DiffPoly sum(derivations, 1);
    for (const auto& [q, c] : terms) {
      Integer w = 1;
      for (std::size_t j = 0; j < q.size(); ++j)
        for (unsigned k = 0; k < q[j]; ++k) w *= Integer(static_cast<long>(lambda.values[j]));
      sum += c * Rational(w);
    }
    return sum;
  }
};

inline LambdaSeparant symbolic_lambda_separant(const DiffPoly& f) {
  if (f.unknowns() != 1) throw DimensionError("symbolic separant is defined for a single unknown");
  if (f.derivations() == 0) throw DimensionError("symbolic separant needs at least one derivation");
  DerivativeVar lead = leader(f, 0);
  unsigned r = lead.index.degree();
  LambdaSeparant out{f.derivations(), r, {}};
  for (const auto& q : indices_of_degree(f.derivations(), r)) {
    DiffPoly d = f.partial(DerivativeVar{0, q});
    if (d.is_zero()) continue;
    MultiIndex tail = q.without(0);
    if (tail.degree() % 2 == 1) d = -d;
    out.terms.emplace(std::move(tail), std::move(d));
  }
  return out;
}

// Candidate tuples of max-norm exactly `norm`, ordered lexicographically
// with entries ranked 0, 1, -1, 2, -2, ...
inline std::vector<LambdaVector> lambda_candidates(std::size_t length, unsigned norm) {
  std::vector<std::int64_t> ranked{0};
  for (std::int64_t v = 1; v <= static_cast<std::int64_t>(norm); ++v) {
    ranked.push_back(v);
    ranked.push_back(-v);
  }
  std::vector<LambdaVector> out;
  std::vector<std::int64_t> cur(length);
  auto rec = [&](auto&& self, std::size_t pos, bool hit) -> void {
    if (pos == length) {
      if (hit || norm == 0) out.push_back(LambdaVector{cur});
      return;
    }
    for (std::int64_t v : ranked) {
      cur[pos] = v;
      self(self, pos + 1, hit || static_cast<unsigned>(v < 0 ? -v : v) == norm);
    }
  };
  rec(rec, 0, false);
  return out;
}

struct IntegralWitness {
  DiffPoly relation;  // single unknown, vanishes on the witness
  TruncatedSeries witness;
};

struct IntegralChange {
  LambdaVector lambda;
  DerivationMatrix matrix;
  std::vector<DiffPoly> transformed;
  std::vector<TruncatedSeries> witnesses;
};

inline constexpr unsigned default_lambda_bound = 32;

// Searches lambda by increasing max-norm so that every relation becomes
// Delta*-integral at its coordinate-changed witness.
inline IntegralChange find_integral_change(std::size_t derivations, const std::vector<IntegralWitness>& relations,
                                           unsigned bound = default_lambda_bound) {
  if (derivations == 0) throw DimensionError("a change of derivations needs at least one derivation");
  for (const auto& rel : relations) {
    if (rel.relation.derivations() != derivations || rel.relation.unknowns() != 1)
      throw ContextError("relations must be single-unknown polynomials in the given derivations");
    if (!evaluate_jet(rel.relation, {rel.witness}).is_zero())
      throw ContextError("a relation does not vanish on its witness");
  }
  for (unsigned norm = 0; norm <= bound; ++norm) {
    for (auto& lambda : lambda_candidates(derivations - 1, norm)) {
      DerivationMatrix m = DerivationMatrix::from_lambda(lambda);
      IntegralChange change{lambda, m, {}, {}};
      bool ok = true;
      for (const auto& rel : relations) {
        DiffPoly t = transform(rel.relation, m);
        TruncatedSeries w = coordinate_change_series(rel.witness, m);
        if (!is_integral(t, w)) {
          ok = false;
          break;
        }
        change.transformed.push_back(std::move(t));
        change.witnesses.push_back(std::move(w));
      }
      if (ok) return change;
    }
  }
  throw SearchExhaustedError(bound);
}

}  // namespace dalg
