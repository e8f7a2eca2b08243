#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "dalg/ck_solver.hpp"
#include "dalg/delta0_reduction.hpp"
#include "support/builders.hpp"
#include "support/generators.hpp"

using namespace dalg;

namespace {

const build::Ring R1{1};
const build::Ring R2{2};

TruncatedSeries tvar(std::size_t m, int order, std::size_t i) {
  return TruncatedSeries::variable(std::vector<Rational>(m, 0), order, i);
}

// Solution of a relation linear in its leader, from random Cauchy data.
std::optional<TruncatedSeries> solve_linear(testgen::Gen& g, const DiffPoly& rel, int N) {
  std::size_t m = rel.derivations();
  DerivativeVar lead = leader(rel);
  unsigned r = lead.index[0];
  auto parts = rel.coefficients_in(lead);
  PDESystem sys{m, 1, {NormalFormEquation{r, DiffRationalFunction(-parts[0], parts[1])}}};
  InitialData init{{{}}};
  for (unsigned k = 0; k < r; ++k) init.slices[0].push_back(g.series(std::vector<Rational>(m - 1, 0), N, 4));
  try {
    Solution sol = ck_solve(sys, init, 0, N);
    return sol.components[0];
  } catch (const DenominatorVanishesError&) {
    return std::nullopt;
  } catch (const PoleError&) {
    return std::nullopt;
  }
}

// x = c (t1 + h)^e solves (d1 x)^e - (e c^(1/e))^e x^(e-1) for e = 2, 3 with c = 1.
struct PowerFamily {
  DiffPoly relation;
  TruncatedSeries solution;
};

PowerFamily power_family(testgen::Gen& g, std::size_t m, unsigned e, int N) {
  std::vector<Rational> w(m, 0);
  TruncatedSeries h = TruncatedSeries::constant(w, N, g.nonzero_rational());
  if (m > 1) h = h + tvar(m, N, 1) * g.rational();
  TruncatedSeries base = tvar(m, N, 0) + h;
  TruncatedSeries x = TruncatedSeries::constant(w, N, 1);
  for (unsigned k = 0; k < e; ++k) x = x * base;
  DiffPoly d1x = DiffPoly::variable(m, 1, 0, MultiIndex::unit(m, 0));
  DiffPoly xx = DiffPoly::variable(m, 1, 0, MultiIndex(m));
  Rational coeff = 1;
  for (unsigned k = 0; k < e; ++k) coeff *= e;
  return {d1x.pow(e) - xx.pow(e - 1) * coeff, x};
}

bool has_offending(const DiffPoly& p, const IntegralRelation& rel) {
  for (const auto& v : p.variables())
    if (rel.offending(v)) return true;
  return false;
}

void check_evaluation_identity(const DiffPoly& q, const IntegralRelation& rel, const TruncatedSeries& s) {
  Reduction red = reduce_delta1(q, rel);
  TruncatedSeries sep = evaluate_jet(rel.separant(), {s});
  TruncatedSeries lhs = evaluate_jet(q, {s});
  TruncatedSeries rhs = evaluate_jet(red.reduced, {s});
  int shared = std::min({sep.order(), lhs.order(), rhs.order()});
  TruncatedSeries scaled = lhs.truncated(shared);
  for (unsigned k = 0; k < red.separant_power; ++k) scaled = scaled * sep.truncated(shared);
  EXPECT_EQ(scaled, rhs.truncated(shared));
}

}  // namespace

TEST(IntegralRelation, RejectsNonIntegralLeaders) {
  EXPECT_THROW(IntegralRelation(R2.x({0, 1}) - R2.c(1)), NotIntegralError);
  EXPECT_THROW(IntegralRelation(R2.z(0)), NoLeaderError);
  IntegralRelation rel(R1.x({1}).pow(2) - R1.c(4) * R1.x0());
  EXPECT_EQ(rel.order(), 1u);
  EXPECT_FALSE(rel.linear_in_leader());
  EXPECT_EQ(rel.separant(), R1.c(2) * R1.x({1}));
}

TEST(Reduce, Examples) {
  IntegralRelation exp1(R1.x({1}) - R1.x0());
  Reduction a = reduce_delta1(R1.x({3}), exp1);
  EXPECT_EQ(a.reduced, R1.x0());
  EXPECT_EQ(a.separant_power, 0u);

  IntegralRelation exp2(R2.x({1, 0}) - R2.x0());
  Reduction b = reduce_delta1(R2.x({2, 1}), exp2);
  EXPECT_EQ(b.reduced, R2.x({0, 1}));
  EXPECT_EQ(b.separant_power, 0u);

  Reduction c = reduce_delta1(R1.x0(), exp1);
  EXPECT_EQ(c.reduced, R1.x0());
  EXPECT_EQ(c.separant_power, 0u);

  // 2 d1x * d1^2 x = 4 d1x modulo the relation.
  IntegralRelation sq(R1.x({1}).pow(2) - R1.c(4) * R1.x0());
  Reduction d = reduce_delta1(R1.x({2}), sq);
  EXPECT_EQ(d.reduced, R1.c(4) * R1.x({1}));
  EXPECT_EQ(d.separant_power, 1u);

  EXPECT_THROW(reduce_delta1(R2.x0(), exp1), ContextError);
}

TEST(Reduce, NormalFormIdempotenceAndIdentityOnLinearRelations) {
  testgen::Gen g(401);
  int checked = 0;
  for (int trial = 0; trial < 160; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 3));
    unsigned r = static_cast<unsigned>(g.uniform(1, 2));
    DiffPoly p = g.integral_shaped(m, r, 2, 1);
    if (p.degree_in(leader(p)) != 1) continue;
    IntegralRelation rel(p);
    DiffPoly q = g.nonconstant_diffpoly(m, 1, 2, r + 2, 3, 1);
    Reduction red = reduce_delta1(q, rel);
    EXPECT_FALSE(has_offending(red.reduced, rel));
    Reduction again = reduce_delta1(red.reduced, rel);
    EXPECT_EQ(again.reduced, red.reduced);
    EXPECT_EQ(again.separant_power, 0u);
    auto s = solve_linear(g, p, 7);
    if (!s || evaluate_jet(rel.separant(), {*s}).constant_term() == 0) continue;
    check_evaluation_identity(q, rel, *s);
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(Reduce, EvaluationIdentityOnNonlinearFamilies) {
  testgen::Gen g(402);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 3));
    unsigned e = static_cast<unsigned>(g.uniform(2, 3));
    PowerFamily fam = power_family(g, m, e, 7);
    IntegralRelation rel(fam.relation);
    ASSERT_TRUE(evaluate_jet(fam.relation, {fam.solution}).is_zero());
    DiffPoly q = g.nonconstant_diffpoly(m, 1, 2, 3, 3, 1);
    Reduction red = reduce_delta1(q, rel);
    for (const auto& v : red.reduced.variables()) EXPECT_LE(v.index[0], rel.order());
    EXPECT_EQ(reduce_delta1(red.reduced, rel).separant_power, 0u);
    check_evaluation_identity(q, rel, fam.solution);
  }
}

TEST(Reduce, RelationReducesToAVanishingPolynomial) {
  testgen::Gen g(403);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t m = static_cast<std::size_t>(g.uniform(1, 2));
    PowerFamily fam = power_family(g, m, 2, 6);
    IntegralRelation rel(fam.relation);
    Reduction red = reduce_delta1(dp_derive(fam.relation, 0), rel);
    EXPECT_TRUE(evaluate_jet(red.reduced, {fam.solution}).is_zero());
  }
}

TEST(Fingen, Examples) {
  IntegralRelation exp2(R2.x({1, 0}) - R2.x0());
  GeneratorSet a = fingen_generators(exp2, 1);
  std::vector<DerivativeVar> vars;
  for (const auto& gv : a.derivatives) vars.push_back(gv.var);
  EXPECT_EQ(vars, (std::vector<DerivativeVar>{R2.var({0, 0}), R2.var({1, 0}), R2.var({0, 1}), R2.var({1, 1})}));
  EXPECT_EQ(a.b2, R2.c(1));
  ASSERT_EQ(a.inverse_separant.size(), 2u);
  EXPECT_EQ(a.inverse_separant[0].value.numerator(), R2.c(1));
  EXPECT_TRUE(a.inverse_separant[1].value.numerator().is_zero());
  EXPECT_EQ(a.b1, "b1");

  GeneratorSet b = fingen_generators(IntegralRelation(R1.x0().pow(2) - R1.z(0)), 0);
  ASSERT_EQ(b.derivatives.size(), 1u);
  EXPECT_EQ(b.derivatives[0].var, R1.var({0}));
  EXPECT_EQ(b.inverse_separant.size(), 1u);
  EXPECT_EQ(b.b2, R1.c(2) * R1.x0());

  GeneratorSet c = fingen_generators(IntegralRelation(R1.x({1}).pow(2) - R1.c(4) * R1.x0()), 0);
  ASSERT_EQ(c.derivatives.size(), 2u);
  EXPECT_EQ(c.derivatives[1].var, R1.var({1}));
  const auto& inv = c.inverse_separant[0].value;
  EXPECT_EQ(inv.numerator() * (R1.c(2) * R1.x({1})), inv.denominator());

  EXPECT_THROW(fingen_generators(exp2, -1), DomainError);
}

TEST(Fingen, CountsAndDerivedInverses) {
  build::Ring R3{3};
  IntegralRelation rel(R3.x({2, 0, 0}) * R3.x0() - R3.x({0, 1, 0}));
  GeneratorSet s = fingen_generators(rel, 2);
  // (r + 1) * C(2 + 2, 2) derivative generators.
  EXPECT_EQ(s.derivatives.size(), 3u * 6u);
  EXPECT_EQ(s.inverse_separant.size(), 6u);
  for (const auto& inv : s.inverse_separant) {
    DiffRationalFunction expected(R3.c(1), rel.separant());
    for (std::size_t i = 0; i < inv.gamma.size(); ++i)
      for (unsigned k = 0; k < inv.gamma[i]; ++k) expected = dp_derive(expected, i + 1);
    EXPECT_EQ(inv.value, expected);
  }
}
