#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "dalg/multi_index.hpp"
#include "dalg/polynomial.hpp"
#include "dalg/rational_function.hpp"
#include "dalg/series.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace dalg;

namespace {

Polynomial z(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial c(std::size_t n, const Rational& v) { return Polynomial::constant(n, v); }
TruncatedSeries t(std::vector<Rational> w, int order, std::size_t i) { return TruncatedSeries::variable(std::move(w), order, i); }
TruncatedSeries one(std::vector<Rational> w, int order) { return TruncatedSeries::constant(std::move(w), order, 1); }

}  // namespace

TEST(Grlex, Examples) {
  EXPECT_EQ(grlex_compare(MultiIndex({0, 1}), MultiIndex({1, 0})), std::strong_ordering::less);
  EXPECT_EQ(grlex_compare(MultiIndex({2, 0}), MultiIndex({0, 1})), std::strong_ordering::greater);
  EXPECT_EQ(grlex_compare(MultiIndex({1, 1}), MultiIndex({1, 1})), std::strong_ordering::equal);
  EXPECT_THROW(grlex_compare(MultiIndex{1}, MultiIndex({1, 0})), DimensionError);
}

TEST(Grlex, TotalOrderOnRandomTriples) {
  testgen::Gen g(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t dim = static_cast<std::size_t>(g.uniform(1, 4));
    MultiIndex a = g.index(dim, 4), b = g.index(dim, 4), c = g.index(dim, 4);
    auto ab = grlex_compare(a, b), ba = grlex_compare(b, a);
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_EQ(ab < 0, ba > 0);
    if (ab <= 0 && grlex_compare(b, c) <= 0) {
      EXPECT_TRUE(grlex_compare(a, c) <= 0);
    }
  }
}

TEST(Grlex, WellOrderOnFiniteSamples) {
  testgen::Gen g(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MultiIndex> sample;
    for (int k = 0; k < 20; ++k) sample.push_back(g.index(3, 5));
    auto mn = *std::min_element(sample.begin(), sample.end(), GrlexLess{});
    for (const auto& s : sample) EXPECT_TRUE(grlex_compare(mn, s) <= 0);
  }
}

TEST(MultiIndex, IndicesUpToAreGrlexSortedAndComplete) {
  auto all = indices_up_to(3, 3);
  EXPECT_EQ(all.size(), 20u);  // C(3+3, 3)
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end(), GrlexLess{}));
  EXPECT_EQ(indices_of_degree(0, 0).size(), 1u);
}

TEST(MultiIndex, ArithmeticAndFactorial) {
  MultiIndex a{2, 1};
  EXPECT_EQ(a.degree(), 3u);
  EXPECT_EQ(a.factorial(), 2);
  EXPECT_EQ(a - MultiIndex({1, 1}), MultiIndex({1, 0}));
  EXPECT_THROW(MultiIndex({0, 1}) - MultiIndex({1, 0}), DomainError);
  EXPECT_EQ(a.without(0), MultiIndex{1});
  EXPECT_EQ(MultiIndex{1}.with_inserted(0, 3), MultiIndex({3, 1}));
}

TEST(Polynomial, RingLawsRandom) {
  testgen::Gen g(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 3));
    Polynomial a = g.polynomial(n, 3, 4), b = g.polynomial(n, 3, 4), d = g.polynomial(n, 3, 4);
    EXPECT_EQ(a * (b + d), a * b + a * d);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * d, a * (b * d));
    EXPECT_EQ(a - a, Polynomial(n));
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ((a * b).derivative(i), a.derivative(i) * b + a * b.derivative(i));
  }
}

TEST(Polynomial, GcdDividesAndRecoversCommonFactor) {
  testgen::Gen g(22);
  for (int trial = 0; trial < 80; ++trial) {
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 3));
    Polynomial f = g.nonzero_polynomial(n, 2, 3);
    Polynomial a = g.nonzero_polynomial(n, 2, 3) * f;
    Polynomial b = g.nonzero_polynomial(n, 2, 3) * f;
    Polynomial h = gcd(a, b);
    EXPECT_NO_THROW(divide_exact(a, h));
    EXPECT_NO_THROW(divide_exact(b, h));
    EXPECT_NO_THROW(divide_exact(h, f.is_constant() ? h : detail::monic(f)));
    EXPECT_EQ(h.leading_coefficient(), 1);
  }
}

TEST(Polynomial, GcdKnownCases) {
  Polynomial x = z(2, 0), y = z(2, 1);
  EXPECT_EQ(gcd(x * x - y * y, x * x + x * y), x + y);
  EXPECT_EQ(gcd(x * y, x + c(2, 1)), c(2, 1));
  EXPECT_EQ(gcd(Polynomial(2), c(2, 3) * x), x);
}

TEST(Polynomial, Printing) {
  Polynomial p = c(2, Rational(3, 2)) * z(2, 0) * z(2, 0) * z(2, 1) - z(2, 0) + c(2, 1);
  EXPECT_EQ(to_string(p), "3/2*z1^2*z2 - z1 + 1");
  EXPECT_EQ(to_string(-z(1, 0)), "-z1");
}

TEST(RationalFunction, CanonicalForm) {
  Polynomial x = z(2, 0), y = z(2, 1);
  RationalFunction f(c(2, 2) * (x * x - y * y), c(2, 4) * (x + y));
  EXPECT_EQ(f.numerator(), c(2, Rational(1, 2)) * (x - y));
  EXPECT_EQ(f.denominator(), c(2, 1));
  RationalFunction g(x, c(2, -3) * y + c(2, 1));
  EXPECT_EQ(g.denominator().leading_coefficient(), 1);
  EXPECT_THROW(RationalFunction(x, Polynomial(2)), DomainError);
}

TEST(RationalFunction, FieldLawsRandom) {
  testgen::Gen g(23);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 2));
    RationalFunction a = g.ratfunc(n), b = g.ratfunc(n), d = g.ratfunc(n);
    EXPECT_EQ(a * (b + d), a * b + a * d);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a * b) * d, a * (b * d));
    if (!b.is_zero()) {
      EXPECT_EQ((a / b) * b, a);
    }
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ((a * b).derivative(i), a.derivative(i) * b + a * b.derivative(i));
  }
}

TEST(RationalFunction, RestrictHyperplaneExamples) {
  RationalFunction z1 = RationalFunction::variable(2, 0), z2 = RationalFunction::variable(2, 1);
  EXPECT_EQ(restrict_hyperplane(z1 + z2, 0), RationalFunction::variable(1, 0));
  RationalFunction one2 = RationalFunction::constant(2, 1);
  EXPECT_THROW(restrict_hyperplane(z2 / (z1 - one2), 1), RestrictionError);
  RationalFunction f = z1 * z2 / (z1 + one2);
  EXPECT_EQ(restrict_hyperplane(f, 2), RationalFunction::variable(1, 0) * Rational(2, 3));
}

TEST(RationalFunction, RestrictionCommutesWithLaterDerivations) {
  testgen::Gen g(24);
  for (int trial = 0; trial < 100; ++trial) {
    RationalFunction f = g.ratfunc(3);
    Rational cval = g.rational();
    try {
      RationalFunction r = restrict_hyperplane(f, cval);
      for (std::size_t j = 1; j < 3; ++j) EXPECT_EQ(restrict_hyperplane(f.derivative(j), cval), r.derivative(j - 1));
    } catch (const RestrictionError&) {
    }
  }
}

TEST(Series, MulExamples) {
  std::vector<Rational> w{0, 0};
  TruncatedSeries a = one(w, 2) + t(w, 2, 0), b = one(w, 2) - t(w, 2, 0);
  EXPECT_EQ(series_mul(a, b), one(w, 2) - t(w, 2, 0) * t(w, 2, 0));
  EXPECT_EQ(series_mul(a.truncated(1), b.truncated(1)), one(w, 1));
  TruncatedSeries s = t(w, 2, 0) + t(w, 2, 1);
  EXPECT_EQ(series_mul(s, s), t(w, 2, 0) * t(w, 2, 0) + t(w, 2, 0) * t(w, 2, 1) * Rational(2) + t(w, 2, 1) * t(w, 2, 1));
  EXPECT_THROW(series_mul(a, b.truncated(1)), ContextError);
  EXPECT_THROW(series_mul(a, TruncatedSeries::constant({0, 1}, 2, 1)), ContextError);
}

TEST(Series, DeriveExamples) {
  std::vector<Rational> w{0, 0};
  TruncatedSeries s = t(w, 3, 0) * t(w, 3, 0) * t(w, 3, 1);
  EXPECT_EQ(series_derive(s, 0), t(w, 2, 0) * t(w, 2, 1) * Rational(2));
  EXPECT_TRUE(series_derive(TruncatedSeries::constant(w, 3, 5), 1).is_zero());
  EXPECT_EQ(series_derive(oracle::exp_series(5), 0), oracle::exp_series(4));
  EXPECT_THROW(series_derive(s, 2), DimensionError);
  EXPECT_THROW(series_derive(TruncatedSeries::constant(w, 0, 1), 0), ContextError);
}

TEST(Series, RingLawsLeibnizAndCommutation) {
  testgen::Gen g(31);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 3));
    std::vector<Rational> w(n);
    for (auto& x : w) x = g.rational();
    int N = g.uniform(2, 5);
    TruncatedSeries a = g.series(w, N), b = g.series(w, N), d = g.series(w, N);
    EXPECT_EQ((a * b) * d, a * (b * d));
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + d), a * b + a * d);
    EXPECT_EQ(a * one(w, N), a);
    EXPECT_EQ(a + TruncatedSeries(w, N), a);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ((a * b).derive(i), a.derive(i) * b.truncated(N - 1) + a.truncated(N - 1) * b.derive(i));
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(a.derive(i).derive(j), a.derive(j).derive(i));
    }
  }
}

TEST(Series, InverseIsMultiplicativeInverse) {
  testgen::Gen g(32);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 3));
    std::vector<Rational> w(n, 0);
    int N = g.uniform(0, 5);
    TruncatedSeries s = g.unit_series(w, N);
    EXPECT_EQ(s * inverse(s), one(w, N));
  }
  EXPECT_THROW(inverse(t({0}, 3, 0)), PoleError);
}

TEST(Series, ExpandRatfuncExamples) {
  EXPECT_EQ(expand_ratfunc(RationalFunction::variable(2, 0), {0, 0}, 3), t({0, 0}, 3, 0));
  RationalFunction geo(c(1, 1), c(1, 1) - z(1, 0));
  TruncatedSeries expected(std::vector<Rational>{0}, 3,
                           {{MultiIndex{0}, 1}, {MultiIndex{1}, 1}, {MultiIndex{2}, 1}, {MultiIndex{3}, 1}});
  EXPECT_EQ(expand_ratfunc(geo, {0}, 3), expected);
  RationalFunction pole(z(2, 0), z(2, 0) - c(2, 1));
  EXPECT_THROW(expand_ratfunc(pole, {1, 0}, 4), PoleError);
}

TEST(Series, ExpandIsHomomorphismAndIntertwinesDerivations) {
  testgen::Gen g(33);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = static_cast<std::size_t>(g.uniform(1, 2));
    std::vector<Rational> w(n, 0);
    int N = g.uniform(1, 4);
    RationalFunction f = g.ratfunc(n), h = g.ratfunc(n);
    EXPECT_EQ(expand_ratfunc(f * h, w, N), expand_ratfunc(f, w, N) * expand_ratfunc(h, w, N));
    EXPECT_EQ(expand_ratfunc(f + h, w, N), expand_ratfunc(f, w, N) + expand_ratfunc(h, w, N));
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_EQ(expand_ratfunc(f.derivative(i), w, N - 1), expand_ratfunc(f, w, N).derive(i));
  }
}

TEST(Series, ExpandMatchesTaylorCoefficientsAtShiftedPoint) {
  // f = (z1 + 2)^3 at w = -1: coefficients are C(3,k) * 1^(3-k).
  Polynomial p = (z(1, 0) + c(1, 2)).pow(3);
  TruncatedSeries s = expand_ratfunc(RationalFunction(p), {-1}, 3);
  EXPECT_EQ(s.coefficient(MultiIndex{0}), 1);
  EXPECT_EQ(s.coefficient(MultiIndex{1}), 3);
  EXPECT_EQ(s.coefficient(MultiIndex{2}), 3);
  EXPECT_EQ(s.coefficient(MultiIndex{3}), 1);
}

TEST(Series, CanonicalStorage) {
  TruncatedSeries s({0}, 2, {{MultiIndex{0}, 0}, {MultiIndex{3}, 1}, {MultiIndex{1}, 2}});
  EXPECT_EQ(s.coefficients().size(), 1u);
  EXPECT_THROW(s.coefficient(MultiIndex{3}), ContextError);
  EXPECT_THROW(TruncatedSeries({0}, -1), ContextError);
}

TEST(Series, SliceAndLiftAreInverse) {
  testgen::Gen g(34);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rational> w{g.rational(), g.rational()};
    int N = g.uniform(1, 5);
    TruncatedSeries s = g.series(w, N, 10);
    TruncatedSeries rebuilt(w, N);
    for (int k = 0; k <= N; ++k) rebuilt = rebuilt + lift_first(slice_first(s, static_cast<unsigned>(k)), w[0], static_cast<unsigned>(k), N);
    EXPECT_EQ(rebuilt, s);
  }
}
