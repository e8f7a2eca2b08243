#include <gtest/gtest.h>

#include <vector>

#include "dalg/ck_solver.hpp"
#include "support/builders.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/systems.hpp"

using namespace dalg;

namespace {

const build::Ring R1{1};
const build::Ring R2{2};

TruncatedSeries tvar(std::size_t m, int order, std::size_t i) {
  return TruncatedSeries::variable(std::vector<Rational>(m, 0), order, i);
}

TruncatedSeries constant0(int order, const Rational& c) { return TruncatedSeries::constant({}, order, c); }

PDESystem single(std::size_t m, unsigned order, DiffRationalFunction rhs) {
  PDESystem sys;
  sys.derivations = m;
  sys.unknowns = 1;
  sys.equations.push_back(NormalFormEquation{order, std::move(rhs)});
  return sys;
}

Solution solve_exp(int N) {
  return ck_solve(single(1, 1, DiffRationalFunction(R1.x0())), InitialData{{{constant0(N, 1)}}}, 0, N);
}

Solution solve_transport(int N) {
  return ck_solve(single(2, 1, DiffRationalFunction(R2.x({0, 1}))), InitialData{{{tvar(1, N, 0) * tvar(1, N, 0)}}}, 0, N);
}

Solution solve_wave(int N) {
  TruncatedSeries phi0 = tvar(1, N, 0) * tvar(1, N, 0);
  return ck_solve(single(2, 2, DiffRationalFunction(R2.x({0, 2}))), InitialData{{{phi0, TruncatedSeries({0}, N)}}}, 0, N);
}

PointEvaluation first_example_psi() {
  PointEvaluation psi({0, 0});
  for (const auto& alpha : indices_up_to(2, 2)) psi.set(DerivativeVar{0, alpha}, 0);
  psi.set(R2.var({1, 0}), 1);
  psi.set(R2.var({0, 1}), 2);
  return psi;
}

}  // namespace

TEST(NormalForm, Examples) {
  EXPECT_NO_THROW(validate_normal_form(single(2, 1, DiffRationalFunction(R2.x({0, 1})))));
  EXPECT_NO_THROW(validate_normal_form(single(2, 2, DiffRationalFunction(R2.x({0, 2})))));
  try {
    validate_normal_form(single(2, 1, DiffRationalFunction(R2.x({0, 2}))));
    FAIL() << "heat equation accepted";
  } catch (const NormalFormError& e) {
    EXPECT_EQ(e.equation(), 0u);
    EXPECT_EQ(e.unknown(), 0u);
    EXPECT_EQ(e.alpha(), (std::vector<unsigned>{0, 2}));
  }
  EXPECT_THROW(validate_normal_form(single(2, 1, DiffRationalFunction(R2.x({1, 0})))), NormalFormError);
}

TEST(NormalForm, CoupledOrdersAreCheckedPerUnknown) {
  build::Ring r{2, 2};
  PDESystem sys;
  sys.derivations = 2;
  sys.unknowns = 2;
  // x1 of order 1 may use d1 x2 when x2 has order 2, but not d2^2 x1.
  sys.equations.push_back(NormalFormEquation{1, DiffRationalFunction(r.x({1, 0}, 1) + r.x({0, 1}, 0))});
  sys.equations.push_back(NormalFormEquation{2, DiffRationalFunction(r.x({0, 2}, 1) * r.x0(0))});
  EXPECT_NO_THROW(validate_normal_form(sys));
  sys.equations[0].rhs = DiffRationalFunction(r.x({0, 2}, 0));
  EXPECT_THROW(validate_normal_form(sys), NormalFormError);
}

TEST(Taylor, Examples) {
  PointEvaluation psi = first_example_psi();
  EXPECT_EQ(taylor_homomorphism(psi, R2.x0(), 2), tvar(2, 2, 0) + tvar(2, 2, 1) * Rational(2));

  PointEvaluation e({0});
  for (unsigned k = 0; k <= 6; ++k) e.set(R1.var({k}), 1);
  EXPECT_EQ(taylor_homomorphism(e, R1.x0(), 6), oracle::exp_series(6));

  TruncatedSeries lin = tvar(2, 2, 0) + tvar(2, 2, 1) * Rational(2);
  EXPECT_EQ(taylor_homomorphism(psi, R2.x0() * R2.x0(), 2), lin * lin);
}

TEST(Taylor, SquareMatchesLeibnizBruteForce) {
  testgen::Gen g(301);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 3));
    int N = g.uniform(1, 4);
    PointEvaluation psi(std::vector<Rational>(m, 0));
    for (const auto& alpha : indices_up_to(m, static_cast<unsigned>(N))) psi.set(DerivativeVar{0, alpha}, g.rational());
    DiffPoly x = DiffPoly::variable(m, 1, 0, MultiIndex(m));
    TruncatedSeries t = taylor_homomorphism(psi, x * x, N);
    for (const auto& alpha : indices_up_to(m, static_cast<unsigned>(N))) {
      Rational sum = 0;
      for (const auto& beta : indices_up_to(m, alpha.degree()))
        if (beta.divides(alpha))
          sum += Rational(oracle::multi_binomial(alpha, beta)) * psi.at(DerivativeVar{0, beta}) *
                 psi.at(DerivativeVar{0, alpha - beta});
      EXPECT_EQ(t.coefficient(alpha), sum / Rational(alpha.factorial()));
    }
  }
}

TEST(Taylor, MissingValuesAreUnderdetermined) {
  PointEvaluation psi({0, 0});
  psi.set(R2.var({0, 0}), 1);
  try {
    taylor_homomorphism(psi, R2.x0(), 1);
    FAIL() << "expected underdetermined";
  } catch (const UnderdeterminedError& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"x1(0,1)", "x1(1,0)"}));
  }
}

TEST(Taylor, LawsOnInducedJets) {
  testgen::Gen g(302);
  for (int trial = 0; trial < 80; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 3));
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 2));
    int N = 5;
    std::vector<TruncatedSeries> jets;
    for (std::size_t j = 0; j < n; ++j) jets.push_back(g.series(std::vector<Rational>(m, 0), N));
    PointEvaluation psi = testgen::psi_from_series(jets, N);
    DiffPoly a = g.diffpoly(m, n, 2, 1, 3, 1), b = g.diffpoly(m, n, 2, 1, 3, 1);
    int M = 3;
    TruncatedSeries ta = taylor_homomorphism(psi, a, M), tb = taylor_homomorphism(psi, b, M);
    EXPECT_EQ(taylor_homomorphism(psi, a + b, M), ta + tb);
    EXPECT_EQ(taylor_homomorphism(psi, a * b, M), ta * tb);
    EXPECT_EQ(ta, evaluate_jet(a, jets).truncated(M));
    for (std::size_t i = 0; i < m; ++i) EXPECT_EQ(ta.derive(i), taylor_homomorphism(psi, dp_derive(a, i), M - 1));
  }
}

TEST(JetProlongation, Examples) {
  PointEvaluation seed({0});
  seed.set(R1.var({0}), 1);
  PointEvaluation e = jet_prolongation(R1.x({1}) - R1.x0(), seed, 4);
  for (unsigned k = 0; k <= 4; ++k) EXPECT_EQ(e.at(R1.var({k})), 1);

  DiffPoly sq = R1.x({1}).pow(2) - R1.c(4) * R1.x0();
  PointEvaluation s2({0});
  s2.set(R1.var({0}), 1);
  s2.set(R1.var({1}), 2);
  PointEvaluation p = jet_prolongation(sq, s2, 3);
  EXPECT_EQ(p.at(R1.var({2})), 2);
  EXPECT_EQ(p.at(R1.var({3})), 0);

  PointEvaluation z({0});
  z.set(R1.var({0}), 0);
  z.set(R1.var({1}), 0);
  EXPECT_THROW(jet_prolongation(sq, z, 3), SingularProlongationError);

  PointEvaluation partial({0});
  partial.set(R1.var({0}), 1);
  EXPECT_THROW(jet_prolongation(sq, partial, 3), UnderdeterminedError);
}

TEST(JetProlongation, SatisfiesEveryProlongedRelation) {
  // Every delta^gamma P vanishes under the prolonged evaluation.
  testgen::Gen g(303);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 2));
    DiffPoly p = g.integral_shaped(m, static_cast<unsigned>(g.uniform(1, 2)), 2, 0);
    unsigned r = leader(p).index[0];
    int N = 4;
    PointEvaluation seed(std::vector<Rational>(m, 0));
    for (const auto& alpha : indices_up_to(m, static_cast<unsigned>(N)))
      if (alpha[0] < r) seed.set(DerivativeVar{0, alpha}, g.rational());
    if (p.degree_in(DerivativeVar{0, MultiIndex::unit(m, 0, r)}) != 1) continue;
    PointEvaluation out;
    try {
      out = jet_prolongation(p, seed, N);
    } catch (const SingularProlongationError&) {
      continue;
    }
    for (const auto& gamma : indices_up_to(m, static_cast<unsigned>(N) - r)) EXPECT_EQ(out.apply(dp_derive(p, gamma)), 0);
  }
}

TEST(CkSolve, ClosedForms) {
  EXPECT_EQ(solve_exp(5).components[0], oracle::exp_series(5));
  TruncatedSeries s = tvar(2, 4, 0) + tvar(2, 4, 1);
  EXPECT_EQ(solve_transport(4).components[0], s * s);
  EXPECT_EQ(solve_wave(4).components[0], tvar(2, 4, 0) * tvar(2, 4, 0) + tvar(2, 4, 1) * tvar(2, 4, 1));
}

TEST(CkSolve, ShiftedBasePoint) {
  // d1 u = u at w1 = 2 with u(2) = 3: 3 e^(z1 - 2).
  Solution sol = ck_solve(single(1, 1, DiffRationalFunction(R1.x0())), InitialData{{{constant0(4, 3)}}}, 2, 4);
  TruncatedSeries::Coefficients c;
  for (unsigned k = 0; k <= 4; ++k) c[MultiIndex{k}] = Rational(3) / Rational(factorial(k));
  EXPECT_EQ(sol.components[0], TruncatedSeries({2}, 4, c));
  EXPECT_TRUE(sol.verified());
}

TEST(CkSolve, ErrorCases) {
  EXPECT_THROW(ck_solve(single(2, 1, DiffRationalFunction(R2.x({0, 2}))), InitialData{{{tvar(1, 4, 0)}}}, 0, 3),
               NormalFormError);
  // Data certified to order 2 cannot support order 4.
  EXPECT_THROW(ck_solve(single(2, 1, DiffRationalFunction(R2.x({0, 1}))), InitialData{{{tvar(1, 2, 0)}}}, 0, 4),
               UnderdeterminedError);
  EXPECT_THROW(ck_solve(single(2, 2, DiffRationalFunction(R2.x({0, 2}))), InitialData{{{tvar(1, 4, 0)}}}, 0, 4),
               UnderdeterminedError);
  // u' = 1/u with u(0) = 0.
  DiffRationalFunction inv(R1.c(1), R1.x0());
  EXPECT_THROW(ck_solve(single(1, 1, inv), InitialData{{{constant0(3, 0)}}}, 0, 3), DenominatorVanishesError);
}

TEST(Residual, ExamplesAndCorruption) {
  PDESystem exp_sys = single(1, 1, DiffRationalFunction(R1.x0()));
  Solution e = solve_exp(5);
  auto res = residual(exp_sys, e);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].order(), 4);
  EXPECT_TRUE(res[0].is_zero());

  PDESystem tr = single(2, 1, DiffRationalFunction(R2.x({0, 1})));
  Solution t = solve_transport(4);
  EXPECT_EQ(residual(tr, t)[0].order(), 3);
  EXPECT_TRUE(residual(tr, t)[0].is_zero());

  TruncatedSeries::Coefficients c = e.components[0].coefficients();
  c[MultiIndex{3}] += 1;
  e.components[0] = TruncatedSeries({0}, 5, c);
  EXPECT_FALSE(residual(exp_sys, e)[0].is_zero());
  EXPECT_FALSE(residual_report(exp_sys, e)[0].pass);
}

TEST(CkSolve, RandomSystemsHaveZeroResidualAndRestrictToData) {
  testgen::Gen g(304);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 3));
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 2));
    auto p = testgen::random_problem(g, m, n, 3, g.coin(0.3));
    Solution sol = ck_solve(p.system, p.initial, 0, p.order);
    ASSERT_TRUE(sol.verified());
    for (const auto& r : residual(p.system, sol)) EXPECT_TRUE(r.is_zero());
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(sol.components[i].order(), p.order);
      for (unsigned k = 0; k < p.system.equations[i].order; ++k) {
        TruncatedSeries got = slice_first(sol.components[i], k) * Rational(factorial(k));
        EXPECT_EQ(got, p.initial.slices[i][k].truncated(got.order()));
      }
    }
  }
}

TEST(CkSolve, DeterministicAndInjectiveInTheData) {
  testgen::Gen g(305);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 3));
    auto p = testgen::random_problem(g, m, 1, 3);
    Solution a = ck_solve(p.system, p.initial, 0, p.order);
    Solution b = ck_solve(p.system, p.initial, 0, p.order);
    EXPECT_EQ(a.components, b.components);

    unsigned r = p.system.equations[0].order;
    unsigned k = static_cast<unsigned>(g.uniform(0, static_cast<int>(r) - 1));
    MultiIndex beta = g.index(m - 1, static_cast<unsigned>(p.order) - k);
    TruncatedSeries::Coefficients c = p.initial.slices[0][k].coefficients();
    c[beta] += 1;
    InitialData changed = p.initial;
    changed.slices[0][k] = TruncatedSeries(p.initial.slices[0][k].base_point(), p.initial.slices[0][k].order(), c);
    Solution d = ck_solve(p.system, changed, 0, p.order);
    EXPECT_NE(d.components[0], a.components[0]);
    EXPECT_NE(d.components[0].coefficient(beta.with_inserted(0, k)), a.components[0].coefficient(beta.with_inserted(0, k)));
  }
}

TEST(CkSolve, AgreesWithProlongedTaylorSeries) {
  // m = 1: delta_1^r x = F(x, .., delta_1^(r-1) x) two ways.
  testgen::Gen g(306);
  for (int trial = 0; trial < 30; ++trial) {
    unsigned r = static_cast<unsigned>(g.uniform(1, 3));
    DiffPoly f(1, 1);
    int terms = g.uniform(1, 3);
    for (int t = 0; t < terms; ++t) {
      DiffPoly mono = R1.c(g.nonzero_rational());
      int deg = g.uniform(0, 2);
      for (int d = 0; d < deg; ++d) mono = mono * DiffPoly::variable(1, 1, 0, MultiIndex{static_cast<unsigned>(g.uniform(0, static_cast<int>(r) - 1))});
      f += mono;
    }
    int N = 6;
    std::vector<Rational> phi(r);
    for (auto& v : phi) v = g.rational();
    InitialData init;
    init.slices.emplace_back();
    for (unsigned k = 0; k < r; ++k) init.slices[0].push_back(constant0(N, phi[k]));
    Solution sol = ck_solve(single(1, r, DiffRationalFunction(f)), init, 0, N);

    PointEvaluation seed({0});
    for (unsigned k = 0; k < r; ++k) seed.set(R1.var({k}), phi[k]);
    DiffPoly rel = DiffPoly::variable(1, 1, 0, MultiIndex{r}) - f;
    PointEvaluation psi = jet_prolongation(rel, seed, N);
    EXPECT_EQ(taylor_homomorphism(psi, R1.x0(), N), sol.components[0]);
  }
}

TEST(Extend, Examples) {
  ExtensionGenerator e{R2.x({1, 0}) - R2.x0(), std::nullopt, std::nullopt,
                       {TruncatedSeries::constant({0}, 1, 1) + tvar(1, 1, 0)}};
  Extension ext = extend_dimension_full({e}, 0, 3);
  // Data certified to order 1 limits the extension to order 1.
  EXPECT_EQ(ext.solution.order, 1);
  EXPECT_EQ(ext.solution.components[0], TruncatedSeries::constant({0, 0}, 1, 1) + tvar(2, 1, 0) + tvar(2, 1, 1));
  EXPECT_EQ(restrict_first(ext.solution.components[0]), e.slices[0]);

  ExtensionGenerator longer = e;
  TruncatedSeries::Coefficients c;
  for (unsigned k = 0; k <= 3; ++k) c[MultiIndex{k}] = Rational(1) / Rational(factorial(k));
  longer.slices = {TruncatedSeries({0}, 3, c)};
  Solution full = extend_dimension({longer}, 0, 3);
  TruncatedSeries s = tvar(2, 3, 0) + tvar(2, 3, 1);
  TruncatedSeries expected = TruncatedSeries::constant({0, 0}, 3, 1) + s + s * s * Rational(1, 2) + s * s * s * Rational(1, 6);
  EXPECT_EQ(full.components[0], expected);

  ExtensionGenerator cst{R2.x({1, 0}), std::nullopt, std::nullopt, {tvar(1, 3, 0)}};
  EXPECT_EQ(extend_dimension({cst}, 0, 3).components[0], tvar(2, 3, 1));

  ExtensionGenerator sing{R2.x({1, 0}).pow(2) - R2.c(4) * R2.x0(), std::nullopt, std::nullopt,
                          {TruncatedSeries({0}, 3), TruncatedSeries({0}, 3)}};
  EXPECT_THROW(extend_dimension({sing}, 0, 3), SingularProlongationError);
}

TEST(Extend, NonlinearLeaderUsesProlongedIdentity) {
  // (d1 x)^2 - 4x with x = (z1 + 1 + z2)^2: slices (1 + t)^2 and 2(1 + t).
  TruncatedSeries u = TruncatedSeries::constant({0}, 4, 1) + tvar(1, 4, 0);
  ExtensionGenerator g{R2.x({1, 0}).pow(2) - R2.c(4) * R2.x0(), std::nullopt, std::nullopt, {u * u, u * Rational(2)}};
  Extension ext = extend_dimension_full({g}, 0, 4);
  EXPECT_EQ(ext.system.equations[0].order, 2u);
  TruncatedSeries s = TruncatedSeries::constant({0, 0}, ext.solution.order, 1) + tvar(2, ext.solution.order, 0) +
                      tvar(2, ext.solution.order, 1);
  EXPECT_EQ(ext.solution.components[0], s * s);
}

TEST(Extend, InconsistentSlicesAreRejected) {
  // Supplied delta_1 slice contradicts the relation (d1 x)^2 = 4x.
  TruncatedSeries u = TruncatedSeries::constant({0}, 3, 1) + tvar(1, 3, 0);
  ExtensionGenerator g{R2.x({1, 0}).pow(2) - R2.c(4) * R2.x0(), std::nullopt, std::nullopt, {u * u, u * Rational(3)}};
  EXPECT_THROW(extend_dimension({g}, 0, 3), ConsistencyError);
}

TEST(Extend, ThreeDerivationsAndCoupledGenerators) {
  build::Ring R3{3};
  TruncatedSeries y = tvar(2, 3, 0), w = tvar(2, 3, 1);
  ExtensionGenerator a{R3.x({1, 0, 0}) - R3.x({0, 1, 0}), std::nullopt, std::nullopt, {y * w}};
  ExtensionGenerator b{R3.x({1, 0, 0}) - R3.c(2), std::nullopt, std::nullopt, {w}};
  Extension ext = extend_dimension_full({a, b}, 0, 3);
  ASSERT_EQ(ext.solution.components.size(), 2u);
  TruncatedSeries t1 = tvar(3, 3, 0), t2 = tvar(3, 3, 1), t3 = tvar(3, 3, 2);
  EXPECT_EQ(ext.solution.components[0], (t1 + t2) * t3);
  EXPECT_EQ(ext.solution.components[1], t1 * Rational(2) + t3);
  EXPECT_TRUE(ext.solution.verified());
}
