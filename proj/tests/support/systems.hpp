#pragma once

#include <cstddef>
#include <vector>

#include "dalg/ck_solver.hpp"
#include "support/generators.hpp"

namespace testgen {

// psi(delta^alpha x_j) = alpha! * coefficient of the j-th series, |alpha| <= order.
inline PointEvaluation psi_from_series(const std::vector<TruncatedSeries>& jets, int order) {
  PointEvaluation psi(jets.front().base_point());
  for (std::size_t j = 0; j < jets.size(); ++j)
    for (const auto& alpha : indices_up_to(jets[j].nvars(), static_cast<unsigned>(order)))
      psi.set(DerivativeVar{j, alpha}, jets[j].coefficient(alpha) * Rational(alpha.factorial()));
  return psi;
}

// Derivatives of unknown j admissible on a right-hand side: |alpha| <= r_j, alpha_1 < r_j.
inline std::vector<DerivativeVar> admissible(std::size_t m, std::size_t j, unsigned rj) {
  std::vector<DerivativeVar> out;
  for (const auto& alpha : indices_up_to(m, rj))
    if (alpha[0] < rj) out.push_back(DerivativeVar{j, alpha});
  return out;
}

struct RandomProblem {
  PDESystem system;
  InitialData initial;
  int order = 0;
};

// Normal-form system at the origin with polynomial right-hand sides or, with
// rational = true, the denominator 1 + z_m * (some admissible derivative),
// which is 1 at the base point.
inline RandomProblem random_problem(Gen& g, std::size_t m, std::size_t n, int order, bool rational = false) {
  RandomProblem p;
  p.order = order;
  p.system.derivations = m;
  p.system.unknowns = n;
  std::vector<unsigned> orders(n);
  for (auto& r : orders) r = static_cast<unsigned>(g.uniform(1, 2));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<DerivativeVar> pool;
    for (std::size_t j = 0; j < n; ++j)
      for (auto& v : admissible(m, j, orders[j])) pool.push_back(v);
    DiffPoly rhs(m, n);
    int terms = g.uniform(1, 3);
    for (int t = 0; t < terms; ++t) {
      DiffPoly mono = DiffPoly::constant(m, n, g.coefficient(m, g.uniform(0, 1)));
      int deg = g.uniform(0, 2);
      for (int d = 0; d < deg; ++d)
        mono = mono * DiffPoly::variable(m, n, pool[static_cast<std::size_t>(g.uniform(0, static_cast<int>(pool.size()) - 1))]);
      rhs += mono;
    }
    NormalFormEquation eq;
    eq.order = orders[i];
    if (rational) {
      DiffPoly den = DiffPoly::constant(m, n, 1) + DiffPoly::constant(m, n, RationalFunction::variable(m, m - 1)) *
                                                       DiffPoly::variable(m, n, pool.front());
      eq.rhs = DiffRationalFunction(rhs, den);
    } else {
      eq.rhs = DiffRationalFunction(rhs);
    }
    p.system.equations.push_back(std::move(eq));
  }
  int data_order = required_initial_order(p.system, order);
  std::vector<Rational> lower(m - 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<TruncatedSeries> slices;
    for (unsigned k = 0; k < orders[i]; ++k) slices.push_back(g.series(lower, data_order, 5));
    p.initial.slices.push_back(std::move(slices));
  }
  return p;
}

}  // namespace testgen
