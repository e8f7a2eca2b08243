#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dalg/diffpoly.hpp"
#include "dalg/error.hpp"
#include "dalg/multi_index.hpp"
#include "dalg/rational.hpp"
#include "dalg/series.hpp"

namespace dalg {

inline std::string describe(const DerivativeVar& v) {
  return "x" + std::to_string(v.unknown + 1) + v.index.to_string();
}

// A (not necessarily differential) homomorphism into the constants: values
// for finitely many derivative variables, with coefficients evaluated at the
// base point. Unlisted variables are an error, never zero.
class PointEvaluation {
 public:
  PointEvaluation() = default;
  explicit PointEvaluation(std::vector<Rational> base_point) : base_(std::move(base_point)) {}
  PointEvaluation(std::vector<Rational> base_point, std::map<DerivativeVar, Rational> values)
      : base_(std::move(base_point)), values_(std::move(values)) {}

  const std::vector<Rational>& base_point() const noexcept { return base_; }
  const std::map<DerivativeVar, Rational>& values() const noexcept { return values_; }

  bool contains(const DerivativeVar& v) const { return values_.count(v) != 0; }

  const Rational& at(const DerivativeVar& v) const {
    auto it = values_.find(v);
    if (it == values_.end()) throw UnderdeterminedError("no value for " + describe(v), {describe(v)});
    return it->second;
  }

  void set(const DerivativeVar& v, Rational value) { values_[v] = std::move(value); }

  // psi(P); missing variables are collected instead of thrown when `missing` is given.
  Rational apply(const DiffPoly& p, std::set<DerivativeVar>* missing = nullptr) const {
    Rational sum = 0;
    for (const auto& [mono, c] : p.terms()) {
      Rational t = c.evaluate(base_);
      for (const auto& [v, e] : mono.factors()) {
        auto it = values_.find(v);
        if (it == values_.end()) {
          if (!missing) at(v);
          missing->insert(v);
          t = 0;
          continue;
        }
        for (unsigned k = 0; k < e; ++k) t *= it->second;
      }
      sum += t;
    }
    return sum;
  }

  friend bool operator==(const PointEvaluation&, const PointEvaluation&) = default;

 private:
  std::vector<Rational> base_;
  std::map<DerivativeVar, Rational> values_;
};

namespace detail {

// delta^alpha a for every |alpha| <= order, built incrementally.
inline std::map<MultiIndex, DiffPoly, GrlexLess> derivative_table(const DiffPoly& a, unsigned order) {
  std::map<MultiIndex, DiffPoly, GrlexLess> table;
  for (const auto& alpha : indices_up_to(a.derivations(), order)) {
    if (alpha.is_zero()) {
      table.emplace(alpha, a);
      continue;
    }
    std::size_t i = 0;
    while (alpha[i] == 0) ++i;
    MultiIndex parent = alpha - MultiIndex::unit(alpha.size(), i);
    table.emplace(alpha, dp_derive(table.at(parent), i));
  }
  return table;
}

inline UnderdeterminedError missing_error(const std::string& what, const std::set<DerivativeVar>& missing) {
  std::vector<std::string> names;
  std::string list;
  for (const auto& v : missing) {
    names.push_back(describe(v));
    list += (list.empty() ? "" : ", ") + names.back();
  }
  return UnderdeterminedError(what + ": missing values for " + list, std::move(names));
}

}  // namespace detail

// T(a) = sum_{|alpha| <= N} psi(delta^alpha a) (t - w)^alpha / alpha!.
inline TruncatedSeries taylor_homomorphism(const PointEvaluation& psi, const DiffPoly& a, int order) {
  if (order < 0) throw ContextError("truncation order must be nonnegative");
  if (psi.base_point().size() != a.derivations()) throw DimensionError("base point dimension must equal the derivation count");
  std::set<DerivativeVar> missing;
  TruncatedSeries::Coefficients coeffs;
  for (const auto& [alpha, d] : detail::derivative_table(a, static_cast<unsigned>(order))) {
    Rational value = psi.apply(d, &missing);
    coeffs.emplace(alpha, value / Rational(alpha.factorial()));
  }
  if (!missing.empty()) throw detail::missing_error("Taylor homomorphism is underdetermined", missing);
  return TruncatedSeries(psi.base_point(), order, std::move(coeffs));
}

// Extends a seed to all |alpha| <= N using
// delta^(beta - r e_1) P = sep * delta^beta x + (lower terms), solving for each
// delta^beta x with beta_1 >= r in increasing grlex order. The seed must cover
// alpha_1 < r, and delta_1^r x itself unless P is linear in its leader; seed
// values with alpha_1 = r are kept, higher ones are always recomputed.
inline PointEvaluation jet_prolongation(const DiffPoly& relation, const PointEvaluation& seed, int order) {
  if (relation.unknowns() != 1) throw DimensionError("jet prolongation is defined for a single unknown");
  if (order < 0) throw ContextError("truncation order must be nonnegative");
  std::size_t m = relation.derivations();
  RemarkStep step = eqremark_step(relation, 0);
  unsigned r = step.order;
  DerivativeVar lead{0, MultiIndex::unit(m, 0, r)};
  bool linear = relation.degree_in(lead) == 1;

  std::set<DerivativeVar> missing;
  for (const auto& alpha : indices_up_to(m, static_cast<unsigned>(order))) {
    DerivativeVar v{0, alpha};
    bool needed = alpha[0] < r || (!linear && v == lead);
    if (needed && !seed.contains(v)) missing.insert(v);
  }
  if (!linear && !seed.contains(lead)) missing.insert(lead);
  if (!missing.empty()) throw detail::missing_error("prolongation seed is incomplete", missing);

  Rational sep_value = seed.apply(step.separant);
  if (sep_value == 0) throw SingularProlongationError("separant vanishes on the seed jet");

  PointEvaluation out = seed;
  for (const auto& beta : indices_up_to(m, static_cast<unsigned>(order))) {
    if (beta[0] < r) continue;
    DerivativeVar target{0, beta};
    if (beta[0] == r && seed.contains(target)) continue;
    MultiIndex gamma = beta - MultiIndex::unit(m, 0, r);
    DiffPoly d = dp_derive(relation, gamma);
    auto parts = d.coefficients_in(target);
    if (parts.size() != 2) throw DomainError("prolonged relation is not linear in its new leader");
    Rational lead_value = out.apply(parts[1]);
    if (lead_value == 0) throw SingularProlongationError("separant vanishes at the prolongation of " + describe(target));
    out.set(target, -out.apply(parts[0]) / lead_value);
  }
  return out;
}

// delta_1^r x_i = F_i with F_i depending on delta^alpha x_j, alpha in M_{r_j}.
struct NormalFormEquation {
  unsigned order = 1;
  DiffRationalFunction rhs;
};

struct PDESystem {
  std::size_t derivations = 0;
  std::size_t unknowns = 0;
  std::vector<NormalFormEquation> equations;  // equation i solves for unknown i
};

// phi_{i,k} = (delta_1^k u_i)|_{z_1 = w_1}, k < r_i, as series in z_2..z_m.
struct InitialData {
  std::vector<std::vector<TruncatedSeries>> slices;
};

struct ResidualRecord {
  std::size_t equation = 0;
  int certified_order = 0;
  bool pass = false;

  friend bool operator==(const ResidualRecord&, const ResidualRecord&) = default;
};

struct Solution {
  std::vector<TruncatedSeries> components;
  int order = 0;
  std::vector<ResidualRecord> report;

  bool verified() const {
    return std::all_of(report.begin(), report.end(), [](const ResidualRecord& r) { return r.pass; });
  }
};

inline void validate_normal_form(const PDESystem& sys) {
  if (sys.equations.size() != sys.unknowns) throw DimensionError("need exactly one equation per unknown");
  for (std::size_t i = 0; i < sys.equations.size(); ++i) {
    const auto& eq = sys.equations[i];
    if (eq.order == 0)
      throw NormalFormError(i, i, {}, "equation " + std::to_string(i + 1) + " has order 0; orders must be positive");
    if (eq.rhs.derivations() != sys.derivations || eq.rhs.unknowns() != sys.unknowns)
      throw ContextError("equation " + std::to_string(i + 1) + " is not in the system's context");
    for (const auto& v : eq.rhs.variables()) {
      unsigned rj = sys.equations[v.unknown].order;
      if (v.index.degree() > rj || v.index[0] >= rj) {
        std::vector<unsigned> alpha(v.index.entries().begin(), v.index.entries().end());
        throw NormalFormError(i, v.unknown, alpha,
                              "equation " + std::to_string(i + 1) + ": derivative " + describe(v) +
                                  " violates |alpha| <= " + std::to_string(rj) + ", alpha_1 < " + std::to_string(rj));
      }
    }
  }
}

// delta_1^r x_i * den(F_i) - num(F_i) as a differential polynomial.
inline DiffPoly cleared_equation(const PDESystem& sys, std::size_t i) {
  const auto& eq = sys.equations.at(i);
  DiffPoly lhs = DiffPoly::variable(sys.derivations, sys.unknowns, i, MultiIndex::unit(sys.derivations, 0, eq.order));
  return lhs * eq.rhs.denominator() - eq.rhs.numerator();
}

inline std::vector<TruncatedSeries> residual(const PDESystem& sys, const Solution& sol) {
  unsigned rmax = 0;
  for (const auto& eq : sys.equations) rmax = std::max(rmax, eq.order);
  if (sol.order < static_cast<int>(rmax)) throw ContextError("solution order is below the system order");
  std::vector<TruncatedSeries> out;
  for (std::size_t i = 0; i < sys.equations.size(); ++i) out.push_back(evaluate_jet(cleared_equation(sys, i), sol.components));
  return out;
}

inline std::vector<ResidualRecord> residual_report(const PDESystem& sys, const Solution& sol) {
  std::vector<ResidualRecord> report;
  auto res = residual(sys, sol);
  for (std::size_t i = 0; i < res.size(); ++i) report.push_back({i, res[i].order(), res[i].is_zero()});
  return report;
}

// Initial-data order needed for a solution certified to total degree N.
inline int required_initial_order(const PDESystem& sys, int order) {
  unsigned rmin = ~0u, rmax = 0;
  for (const auto& eq : sys.equations) {
    rmin = std::min(rmin, eq.order);
    rmax = std::max(rmax, eq.order);
  }
  return sys.equations.empty() ? order : order + static_cast<int>(rmax - rmin);
}

// Truncated Cauchy-Kovalevskaya solution at w = (w1, base point of the data).
//
// u_i is built by z_1-levels: the (z_1 - w_1)^(r_i + s) coefficient of u_i is
// the (z_1 - w_1)^s coefficient of F_i times s!/(r_i + s)!, which only uses
// levels below s because every occurring derivative has alpha_1 < r_j.
// Unknowns of higher order are carried to order N + r_i - r_min internally so
// that all right-hand sides stay certified.
inline Solution ck_solve(const PDESystem& sys, const InitialData& init, const Rational& w1, int order) {
  validate_normal_form(sys);
  if (order < 0) throw ContextError("truncation order must be nonnegative");
  std::size_t n = sys.unknowns;
  std::size_t m = sys.derivations;
  if (m == 0) throw DimensionError("a Cauchy problem needs at least one derivation");
  if (init.slices.size() != n) throw UnderdeterminedError("initial data must be given for every unknown");

  unsigned rmin = ~0u, rmax = 0;
  for (const auto& eq : sys.equations) {
    rmin = std::min(rmin, eq.order);
    rmax = std::max(rmax, eq.order);
  }
  if (order < static_cast<int>(rmax))
    throw ContextError("truncation order " + std::to_string(order) + " is below the system order " + std::to_string(rmax));
  std::optional<std::vector<Rational>> lower_base;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& phis = init.slices[i];
    if (phis.size() != sys.equations[i].order)
      throw UnderdeterminedError("unknown " + std::to_string(i + 1) + " needs exactly " +
                                 std::to_string(sys.equations[i].order) + " initial functions");
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const auto& phi = phis[k];
      if (phi.nvars() != m - 1) throw DimensionError("initial data must be series in z_2..z_m");
      if (!lower_base) lower_base = phi.base_point();
      if (phi.base_point() != *lower_base) throw ContextError("initial data at different base points");
      int needed = order + static_cast<int>(sys.equations[i].order - rmin) - static_cast<int>(k);
      if (phi.order() < needed)
        throw UnderdeterminedError("initial function " + std::to_string(k) + " of unknown " + std::to_string(i + 1) +
                                   " is certified to order " + std::to_string(phi.order()) + " but order " +
                                   std::to_string(needed) + " is needed");
    }
  }
  std::vector<Rational> w{w1};
  w.insert(w.end(), lower_base->begin(), lower_base->end());

  std::vector<int> internal(n);
  std::vector<TruncatedSeries> u;
  for (std::size_t i = 0; i < n; ++i) {
    unsigned r = sys.equations[i].order;
    internal[i] = order + static_cast<int>(r - rmin);
    TruncatedSeries ui(w, internal[i]);
    for (unsigned k = 0; k < r; ++k)
      ui = ui + lift_first(init.slices[i][k], w1, k, internal[i]) * Rational(1, factorial(k));
    u.push_back(std::move(ui));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& den = sys.equations[i].rhs.denominator();
    if (!den.is_constant() && detail::evaluate_mixed(den, u).constant_term() == 0)
      throw DenominatorVanishesError("denominator of equation " + std::to_string(i + 1) + " vanishes at the initial jet");
  }

  int levels = order - static_cast<int>(rmin);
  for (int s = 0; s <= levels; ++s) {
    std::vector<TruncatedSeries> next = u;
    for (std::size_t i = 0; i < n; ++i) {
      unsigned r = sys.equations[i].order;
      if (static_cast<int>(r) + s > internal[i]) continue;
      TruncatedSeries rhs = evaluate_jet(sys.equations[i].rhs, u);
      TruncatedSeries level = slice_first(rhs, static_cast<unsigned>(s));
      Rational scale(factorial(static_cast<unsigned>(s)), factorial(r + static_cast<unsigned>(s)));
      scale.canonicalize();
      next[i] = next[i] + lift_first(level, w1, r + static_cast<unsigned>(s), internal[i]) * scale;
    }
    u = std::move(next);
  }

  Solution sol;
  sol.order = order;
  for (std::size_t i = 0; i < n; ++i) sol.components.push_back(u[i].truncated(order));
  sol.report = residual_report(sys, sol);
  return sol;
}

// One generator of the dimension-extension step: a Delta-integral relation in
// a single unknown, optionally with the normal form delta_1^order x = rhs, and
// the slices h(delta_1^k a) on z_1 = w_1 (slices[0] is the lower solution).
struct ExtensionGenerator {
  DiffPoly relation;
  std::optional<unsigned> order;
  std::optional<DiffRationalFunction> rhs;
  std::vector<TruncatedSeries> slices;
};

namespace detail {

// Evaluates a single-unknown P on the hyperplane z_1 = w1 from slices
// phi_k = (delta_1^k x)|_{z_1 = w1}; coefficients are restricted first.
inline TruncatedSeries evaluate_on_slice(const DiffPoly& p, const std::vector<TruncatedSeries>& slices,
                                         const Rational& w1) {
  if (slices.empty()) throw UnderdeterminedError("no slice data");
  const auto& base = slices.front().base_point();
  int out = std::numeric_limits<int>::max();
  for (const auto& s : slices) out = std::min(out, s.order());
  for (const auto& v : p.variables()) {
    if (v.index[0] >= slices.size())
      throw UnderdeterminedError("slice for delta_1^" + std::to_string(v.index[0]) + " is missing");
    out = std::min(out, slices[v.index[0]].order() - static_cast<int>(v.index.degree() - v.index[0]));
  }
  if (out < 0) throw ContextError("slice data is not certified to the needed derivative order");
  TruncatedSeries sum(base, out);
  for (const auto& [mono, c] : p.terms()) {
    TruncatedSeries t = expand_ratfunc(restrict_hyperplane(c, w1), base, out);
    for (const auto& [v, e] : mono.factors()) {
      TruncatedSeries s = slices[v.index[0]];
      for (std::size_t i = 1; i < v.index.size(); ++i)
        for (unsigned k = 0; k < v.index[i]; ++k) s = s.derive(i - 1);
      s = s.truncated(out);
      for (unsigned k = 0; k < e; ++k) t = t * s;
    }
    sum = sum + t;
  }
  return sum;
}

}  // namespace detail

struct Extension {
  PDESystem system;
  InitialData initial;
  Solution solution;
};

// Assembles delta_1^{r_i} a_i = g_i from the generators, solves the Cauchy
// problem on z_1 = w1 and checks that the result restricts to the supplied
// slices and satisfies every relation.
//
// Without a direct g_i: a relation linear in its leader delta_1^r x is solved
// for it (order r, g = -P_0/P_1); otherwise the prolonged identity
// delta_1^(r+1) x = q/sep is used (order r + 1, needing r + 1 slices). The
// requested order is lowered to what the slice data certifies.
inline Extension extend_dimension_full(const std::vector<ExtensionGenerator>& gens, const Rational& w1, int order) {
  if (gens.empty()) throw UnderdeterminedError("no generators to extend");
  if (order < 0) throw ContextError("truncation order must be nonnegative");
  std::size_t n = gens.size();
  std::size_t m = gens.front().relation.derivations();
  Extension ext;
  ext.system.derivations = m;
  ext.system.unknowns = n;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = gens[i];
    std::string name = "generator " + std::to_string(i + 1);
    if (g.relation.unknowns() != 1 || g.relation.derivations() != m)
      throw ContextError("generator relations must be single-unknown polynomials in the same derivations");
    if (g.slices.empty()) throw UnderdeterminedError(name + " has no lower solution");
    DerivativeVar lead = leader(g.relation, 0);
    if (!is_pure_first(lead.index)) throw NotIntegralError(name + " is not Delta-integral: leader is not a pure delta_1 derivative");
    unsigned r = lead.index[0];
    std::vector<std::size_t> to{i};
    NormalFormEquation eq;
    DiffPoly sep = g.relation.partial(lead);
    if (g.rhs) {
      if (!g.order) throw UnderdeterminedError(name + ": a direct right-hand side needs its order");
      eq.order = *g.order;
      eq.rhs = DiffRationalFunction(g.rhs->numerator().relabel_unknowns(n, to),
                                    g.rhs->denominator().relabel_unknowns(n, to));
    } else {
      auto parts = g.relation.coefficients_in(lead);
      if (parts.size() == 2) {
        eq.order = r;
        eq.rhs = DiffRationalFunction(-parts[0].relabel_unknowns(n, to), parts[1].relabel_unknowns(n, to));
      } else {
        RemarkStep step = eqremark_step(g.relation, 0);
        eq.order = r + 1;
        eq.rhs = DiffRationalFunction(step.q.relabel_unknowns(n, to), step.separant.relabel_unknowns(n, to));
      }
    }
    if (g.slices.size() < eq.order)
      throw UnderdeterminedError(name + " needs " + std::to_string(eq.order) + " slices, got " +
                                 std::to_string(g.slices.size()));
    std::vector<TruncatedSeries> slices(g.slices.begin(), g.slices.begin() + eq.order);
    if (!g.rhs && detail::evaluate_on_slice(sep, slices, w1).constant_term() == 0)
      throw SingularProlongationError("separant of " + name + " vanishes at the base point");
    ext.system.equations.push_back(std::move(eq));
    ext.initial.slices.push_back(std::move(slices));
  }

  unsigned rmin = ~0u, rmax = 0;
  for (const auto& eq : ext.system.equations) {
    rmin = std::min(rmin, eq.order);
    rmax = std::max(rmax, eq.order);
  }
  int certified = order;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < ext.initial.slices[i].size(); ++k)
      certified = std::min(certified, ext.initial.slices[i][k].order() + static_cast<int>(k) -
                                          static_cast<int>(ext.system.equations[i].order - rmin));
  if (certified < static_cast<int>(rmax))
    throw UnderdeterminedError("slice data certifies only order " + std::to_string(certified) +
                               ", below the system order " + std::to_string(rmax));

  try {
    ext.solution = ck_solve(ext.system, ext.initial, w1, certified);
  } catch (const DenominatorVanishesError& e) {
    throw SingularProlongationError(std::string("separant vanishes on the initial slice: ") + e.what());
  }

  std::vector<std::size_t> place(1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& u = ext.solution.components[i];
    for (unsigned k = 0; k < ext.system.equations[i].order; ++k) {
      TruncatedSeries got = slice_first(u, k) * Rational(factorial(k));
      const auto& want = ext.initial.slices[i][k];
      if (got != want.truncated(got.order()))
        throw ConsistencyError("extended solution " + std::to_string(i + 1) + " does not restrict to its slice " +
                               std::to_string(k));
    }
    place[0] = i;
    DiffPoly rel = gens[i].relation.relabel_unknowns(n, place);
    if (!detail::evaluate_mixed(rel, ext.solution.components).is_zero())
      throw ConsistencyError("extended solution " + std::to_string(i + 1) + " does not satisfy its relation");
  }
  return ext;
}

inline Solution extend_dimension(const std::vector<ExtensionGenerator>& gens, const Rational& w1, int order) {
  return extend_dimension_full(gens, w1, order).solution;
}

}  // namespace dalg
