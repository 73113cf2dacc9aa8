#include <gtest/gtest.h>

#include <map>
#include <random>

#include "common.h"
#include "qva/formal.h"

using namespace qva;
using qva::test::Q;

namespace {

const std::vector<std::string> kX12{"x1", "x2"};

// C(n, k) from the Pascal recurrence alone, run downward for negative n.
Integer pascal(long n, long k) {
  static std::map<std::pair<long, long>, Integer> memo;
  if (k < 0) return 0;
  if (k == 0) return 1;
  if (n == 0) return 0;
  if (auto it = memo.find({n, k}); it != memo.end()) return it->second;
  Integer r = n > 0 ? Integer(pascal(n - 1, k) + pascal(n - 1, k - 1)) : Integer(pascal(n + 1, k) - pascal(n, k - 1));
  memo[{n, k}] = r;
  return r;
}

}  // namespace

TEST(Rational, BinomMatchesPascalRecurrence) {
  for (long n = -9; n <= 9; ++n)
    for (long k = -1; k <= 9; ++k) EXPECT_EQ(binom(n, k), pascal(n, k)) << n << " " << k;
}

TEST(Rational, FactorialAndFormatting) {
  EXPECT_EQ(factorial(0), 1);
  EXPECT_EQ(factorial(6), 720);
  EXPECT_EQ(to_string(parse_rational("3")), "3/1");
  EXPECT_EQ(to_string(parse_rational("-6/4")), "-3/2");
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    Rational r(static_cast<long>(rng() % 2001) - 1000, static_cast<long>(rng() % 97) + 1);
    r.canonicalize();
    EXPECT_EQ(parse_rational(to_string(r)), r);
  }
}

TEST(Formal, PositivePowerIsPolynomialInEitherOrder) {
  for (auto order : {VarOrder(kX12), VarOrder({"x2", "x1"})}) {
    auto f = DirectedRational::difference(kX12, order, "x1", "x2", 1);
    auto s = iota_expand(f, Box::cube(2, -4, 4));
    EXPECT_EQ(s.terms().size(), 2u);
    EXPECT_EQ(s.coeff({1, 0}), 1);
    EXPECT_EQ(s.coeff({0, 1}), -1);
    EXPECT_TRUE(f.is_polynomial());
  }
}

TEST(Formal, GeometricExpansion) {
  auto f = DirectedRational::difference(kX12, VarOrder(kX12), "x1", "x2", -1);
  auto s = iota_expand(f, Box::cube(2, -6, 6));
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b) EXPECT_EQ(s.coeff({a, b}), (b >= 0 && a == -1 - b) ? 1 : 0) << a << "," << b;
}

TEST(Formal, InverseSquareMatchesConvolutionOfGeometricSeries) {
  // Oracle: square the x2-first expansion of (x1 - x2)^{-1} = -sum x2^{-1-k} x1^k by convolution.
  std::map<std::pair<int, int>, Rational> geo, sq;
  for (int k = 0; k <= 12; ++k) geo[{k, -1 - k}] = -1;
  for (const auto& [e1, c1] : geo)
    for (const auto& [e2, c2] : geo) sq[{e1.first + e2.first, e1.second + e2.second}] += c1 * c2;
  auto f = DirectedRational::difference(kX12, VarOrder({"x2", "x1"}), "x1", "x2", -2);
  auto s = iota_expand(f, Box::cube(2, -6, 6));
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b) {
      auto it = sq.find({a, b});
      EXPECT_EQ(s.coeff({a, b}), it == sq.end() ? Rational(0) : it->second);
    }
}

TEST(Formal, DeltaAndItsDerivative) {
  const Box box = Box::cube(2, -5, 5);
  auto d0 = delta_series(kX12, "x1", "x2", 0, box);
  auto d1 = delta_series(kX12, "x1", "x2", 1, box);
  for (int m = -5; m <= 5; ++m) {
    if (-m - 1 >= -5 && -m - 1 <= 5) EXPECT_EQ(d0.coeff({m, -m - 1}), 1);
    if (-m - 2 >= -5 && -m - 2 <= 5) EXPECT_EQ(d1.coeff({m, -m - 2}), -m - 1);
  }
  const Box inner = Box::cube(2, -4, 4);
  EXPECT_TRUE(d1.equal_on(d0.derivative(1), inner));
  // the difference of the two expansions of (x1 - x2)^{-1}
  auto p = iota_expand(DirectedRational::difference(kX12, VarOrder(kX12), "x1", "x2", -1), box);
  auto q = iota_expand(DirectedRational::difference(kX12, VarOrder({"x2", "x1"}), "x1", "x2", -1), box);
  p -= q;
  EXPECT_TRUE(p.equal_on(d0, box));
}

TEST(Formal, DerivativeDeltaIsExpansionDifferenceOfInverseSquare) {
  const Box box = Box::cube(2, -5, 5);
  for (int j = 0; j <= 3; ++j) {
    auto p = iota_expand(DirectedRational::difference(kX12, VarOrder(kX12), "x1", "x2", -1 - j), box);
    auto q = iota_expand(DirectedRational::difference(kX12, VarOrder({"x2", "x1"}), "x1", "x2", -1 - j), box);
    p -= q;
    EXPECT_TRUE(p.equal_on(delta_series(kX12, "x1", "x2", j, box), box)) << j;
  }
}

TEST(Formal, ProductOfInverseAndLinearIsOne) {
  const VarOrder o({"x2", "x1"});
  auto inv = DirectedRational::difference(kX12, o, "x1", "x2", -1);
  auto lin = DirectedRational::difference(kX12, o, "x1", "x2", 1);
  auto prod = mul(iota_expand(inv, Box::cube(2, -10, 10)), iota_expand(lin, Box{{0, 0}, {1, 1}}));
  const Box inner = Box::cube(2, -4, 4);
  WindowSeries one(kX12, inner);
  one.add({0, 0}, 1);
  EXPECT_TRUE(prod.restricted(inner).equal_on(one, inner));
  // and symbolically
  auto sym = iota_expand(inv * lin, inner);
  EXPECT_TRUE(sym.equal_on(one, inner));
}

TEST(Formal, DeltaSubstitution) {
  const Box box = Box::cube(2, -6, 6);
  Distribution delta(kX12);
  delta.add(delta_term(kX12, "x1", "x2", 0));
  for (int m : {0, 1, 2, -2}) {
    auto g1 = iota_expand(DirectedRational::monomial(kX12, VarOrder(kX12), {m, 0}), Box{{m, 0}, {m, 0}});
    auto g2 = iota_expand(DirectedRational::monomial(kX12, VarOrder(kX12), {0, m}), Box{{0, m}, {0, m}});
    auto lhs = mul(delta, g1).expand(box);
    auto rhs = mul(delta_series(kX12, "x1", "x2", 0, Box{{-20, -20}, {20, 20}}), g2).restricted(box);
    EXPECT_TRUE(lhs.equal_on(rhs, box)) << m;
    // Res_x1 x2^{-1} delta(x1/x2) x1^m = x2^m
    auto res = residue(lhs, "x1");
    for (int b = -6; b <= 6; ++b) EXPECT_EQ(res.coeff({b}), b == m ? 1 : 0);
  }
}

TEST(Formal, Residue) {
  const std::vector<std::string> x{"x"};
  for (int n = -3; n <= 3; ++n) {
    WindowSeries s(x, Box::cube(1, -3, 3));
    s.add({n}, 5);
    auto r = residue(s, "x");
    EXPECT_EQ(r.vars().size(), 0u);
    EXPECT_EQ(r.coeff({}), n == -1 ? 5 : 0);
  }
}

TEST(Formal, SubstituteSum) {
  const std::vector<std::string> x{"x"};
  const VarOrder ox(x);
  const Box box = Box::cube(2, -6, 6);
  auto lin = substitute_sum(DirectedRational::monomial(x, ox, {1}), "x0", "x2", box);
  EXPECT_EQ(lin.terms().size(), 2u);
  EXPECT_EQ(lin.coeff({1, 0}), 1);
  EXPECT_EQ(lin.coeff({0, 1}), 1);

  auto inv = substitute_sum(DirectedRational::monomial(x, ox, {-1}), "x0", "x2", box);
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(inv.coeff({-1 - k, k}), k % 2 ? -1 : 1);

  // x^{-2} as the square of the x^{-1} expansion
  // x0 powers stop at -1 and x2 powers start at 0, so the product is certified on box
  auto wide = substitute_sum(DirectedRational::monomial(x, ox, {-1}), "x0", "x2", Box{{-14, 0}, {-1, 14}});
  auto sq = mul(wide, wide).restricted(box);
  auto inv2 = substitute_sum(DirectedRational::monomial(x, ox, {-2}), "x0", "x2", box);
  EXPECT_TRUE(inv2.equal_on(sq, box));
  for (int k = 0; k <= 4; ++k) EXPECT_EQ(inv2.coeff({-2 - k, k}), (k % 2 ? -1 : 1) * (k + 1));
}

TEST(Formal, WindowRefusesUncertifiedCoefficients) {
  auto f = DirectedRational::difference(kX12, VarOrder(kX12), "x1", "x2", -1);
  auto s = iota_expand(f, Box::cube(2, -3, 3));
  // x2 powers are bounded below by 0, so below the box they are known zeros
  EXPECT_EQ(s.coeff({0, -7}), 0);
  // x1 powers are unbounded below
  EXPECT_THROW(s.coeff({-9, 8}), WindowError);
}

TEST(Formal, RandomRationalsExpandConsistentlyUnderProducts) {
  // (x1-x2)^a (x1-x2)^b = (x1-x2)^{a+b} in a fixed order, for random a, b
  std::mt19937 rng(11);
  const VarOrder o(kX12);
  const Box inner = Box::cube(2, -4, 4);
  for (int t = 0; t < 25; ++t) {
    const int a = static_cast<int>(rng() % 7) - 4, b = static_cast<int>(rng() % 7) - 4;
    auto fa = DirectedRational::difference(kX12, o, "x1", "x2", a);
    auto fb = DirectedRational::difference(kX12, o, "x1", "x2", b);
    auto fab = DirectedRational::difference(kX12, o, "x1", "x2", a + b);
    EXPECT_TRUE(iota_expand(fa * fb, inner).equal_on(iota_expand(fab, inner), inner)) << a << " " << b;
  }
}
