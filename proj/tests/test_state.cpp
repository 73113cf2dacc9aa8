#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "common.h"
#include "qva/state.h"

using namespace qva;
using qva::test::load;
using qva::test::mono;
using qva::test::Q;

namespace {

// Multisets of (color, part) with parts summed to k, by direct enumeration.
long count_multisets(int colors, int k) {
  std::function<long(int, int, int)> rec = [&](int left, int part, int color) -> long {
    if (left == 0) return 1;
    if (part > left) return 0;
    long n = 0;
    // take (color, part) once more, or move on to the next slot
    n += rec(left - part, part, color);
    if (color + 1 < colors)
      n += rec(left, part, color + 1);
    else
      n += rec(left, part + 1, 0);
    return n;
  };
  return rec(k, 1, 0);
}

State commutator(const ModuleEngine& M, int a, int m, int b, int n, const Monomial& w) {
  return M.apply_mode(a, m, M.apply_mode(b, n, w)) - M.apply_mode(b, n, M.apply_mode(a, m, w));
}

}  // namespace

TEST(State, Sl2ModeActions) {
  const AlgebraSpec s = load("sl2-affine");
  ModuleEngine M(s);
  const Monomial f1 = mono(s, {{"f", -1}});
  EXPECT_EQ(M.apply_mode(s.index("e"), 0, f1), State::basis(mono(s, {{"h", -1}})));
  EXPECT_EQ(M.apply_mode(s.index("e"), 1, f1), State::vacuum());
  EXPECT_TRUE(M.apply_mode(s.index("h"), 2, Monomial{}).is_zero());
  // e(-1) f(-1) |0> is already ordered
  const auto ef = M.act_monomial_on_vacuum({Mode{s.index("e"), -1}, Mode{s.index("f"), -1}});
  EXPECT_EQ(ef, State::basis(mono(s, {{"e", -1}, {"f", -1}})));
}

TEST(State, HeisenbergPairing) {
  const AlgebraSpec s = load("heisenberg-rank1");
  ModuleEngine M(s);
  EXPECT_EQ(M.apply_mode(s.index("us"), 0, mono(s, {{"u", -1}})), State::vacuum());
  EXPECT_TRUE(M.apply_mode(s.index("u"), 0, mono(s, {{"u", -1}})).is_zero());
}

TEST(State, Levels) {
  const AlgebraSpec s = load("sl2-affine");
  ModuleEngine M(s);
  EXPECT_EQ(M.level(Monomial{}), 0);
  EXPECT_EQ(M.level(mono(s, {{"e", -1}, {"f", -1}})), 2);
  EXPECT_EQ(M.level(mono(s, {{"h", -3}})), 3);
  EXPECT_EQ(M.level(State{}), -1);
}

TEST(State, BasisCountsMatchColoredPartitions) {
  for (const auto& [name, colors] : std::vector<std::pair<std::string, int>>{
           {"heisenberg-rank1", 2}, {"heisenberg-rank2", 4}, {"sl2-affine", 3}, {"semidirect-borel", 6}}) {
    SCOPED_TRACE(name);
    ModuleEngine M(load(name));
    const auto basis = M.enumerate_basis(5);
    std::vector<long> per(6, 0);
    for (const auto& m : basis) ++per[static_cast<std::size_t>(M.level(m))];
    for (int k = 0; k <= 5; ++k) {
      EXPECT_EQ(per[static_cast<std::size_t>(k)], count_multisets(colors, k)) << k;
      EXPECT_EQ(colored_partitions(colors, k), count_multisets(colors, k)) << k;
    }
  }
  ModuleEngine H(load("heisenberg-rank1"));
  EXPECT_EQ(H.enumerate_basis(0).size(), 1u);
  EXPECT_EQ(H.enumerate_basis(1).size(), 3u);
  EXPECT_EQ(H.enumerate_basis(2).size(), 8u);
}

TEST(State, GrDimsOfFreeFamilies) {
  ModuleEngine H(load("heisenberg-rank1"));
  const GrDims g = gr_dimensions(H, 2);
  ASSERT_TRUE(g.comparison_available);
  EXPECT_EQ(g.actual, (std::vector<long>{1, 2, 5}));
  EXPECT_EQ(g.free_expected, g.actual);

  ModuleEngine Z(load("zf-nilpotent"));
  const GrDims z = gr_dimensions(Z, 3);
  ASSERT_TRUE(z.comparison_available);
  EXPECT_EQ(z.actual, z.free_expected);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(z.actual[static_cast<std::size_t>(k)], count_multisets(4, k));
}

TEST(State, TruncationAboveTheLevel) {
  for (const char* name : {"sl2-affine", "heisenberg-rank2", "zf-nilpotent", "semidirect-borel"}) {
    SCOPED_TRACE(name);
    ModuleEngine M(load(name));
    for (const auto& m : M.enumerate_basis(3))
      for (int a = 0; a < M.spec().size(); ++a)
        for (int n = M.level(m) + 1; n <= M.level(m) + 3; ++n) EXPECT_TRUE(M.apply_mode(a, n, m).is_zero());
  }
}

TEST(State, LieCommutatorOnRandomStates) {
  // a(m) b(n) - b(n) a(m) = [a,b](m+n) + central term, on random basis states
  std::mt19937 rng(2024);
  for (const char* name : {"sl2-affine", "heisenberg-rank2", "semidirect-borel"}) {
    SCOPED_TRACE(name);
    const AlgebraSpec s = load(name);
    ModuleEngine M(s);
    const auto basis = M.enumerate_basis(3);
    for (int t = 0; t < 150; ++t) {
      const int a = static_cast<int>(rng() % static_cast<unsigned>(s.size()));
      const int b = static_cast<int>(rng() % static_cast<unsigned>(s.size()));
      const int m = static_cast<int>(rng() % 7) - 3, n = static_cast<int>(rng() % 7) - 3;
      const Monomial& w = basis[rng() % basis.size()];
      // half-current generators have no modes a(m), m >= 0
      if ((m >= 0 && !s.has_nonnegative_modes(a)) || (n >= 0 && !s.has_nonnegative_modes(b))) continue;
      State want;
      for (const auto& [c, k] : s.bracket_of(a, b)) want.add(M.apply_mode(c, m + n, w), k);
      const Rational f = s.form_of(a, b);
      if (s.family == Family::heisenberg && m + n + 1 == 0) want.add(w, f);
      if (s.family != Family::heisenberg && m + n == 0) want.add(w, s.level * m * f);
      EXPECT_EQ(commutator(M, a, m, b, n, w), want) << a << "(" << m << ") " << b << "(" << n << ")";
    }
  }
}

TEST(State, MemoizationDoesNotChangeResults) {
  const AlgebraSpec s = load("zf-nilpotent");
  ModuleEngine with(s), without(s, EngineOptions{false, 10});
  for (const auto& m : with.enumerate_basis(3))
    for (int a = 0; a < s.size(); ++a)
      for (int n = -2; n <= 2; ++n) EXPECT_EQ(with.apply_mode(a, n, m), without.apply_mode(a, n, m));
}

TEST(State, VacuumVanishingInTheFilteredFamilies) {
  // a1(n1) ... ar(nr) |0> = 0 whenever n1 + ... + nr >= 0
  std::mt19937 rng(99);
  for (const char* name : {"heisenberg-rank1", "heisenberg-rank2", "zf-nilpotent", "sl2-halfcurrent", "cx-derivation"}) {
    SCOPED_TRACE(name);
    ModuleEngine M(load(name));
    const auto gens = M.field_generators();
    int tried = 0;
    while (tried < 200) {
      const int r = 1 + static_cast<int>(rng() % 4);
      std::vector<Mode> modes;
      int sum = 0;
      for (int i = 0; i < r; ++i) {
        const int n = static_cast<int>(rng() % 9) - 4;
        modes.push_back(Mode{gens[rng() % gens.size()], n});
        sum += n;
      }
      if (sum < 0) continue;
      ++tried;
      EXPECT_TRUE(M.act_monomial_on_vacuum(modes).is_zero());
    }
  }
}

TEST(State, AffineCentralTermBreaksVacuumVanishing) {
  // the affine central term gives a mode list with sum 0 that does not kill |0>
  const AlgebraSpec s = load("sl2-affine");
  ModuleEngine M(s);
  EXPECT_EQ(M.act_monomial_on_vacuum({Mode{s.index("e"), 1}, Mode{s.index("f"), -1}}), State::vacuum());
}

TEST(State, ZfStraighteningStaysInTheFiltration) {
  const AlgebraSpec s = load("zf-nilpotent");
  ModuleEngine M(s);
  // v1(1) u2(-1) u2(-1) |0> lies in W[0]
  const State r = M.apply_mode(s.index("v1"), 1, mono(s, {{"u2", -1}, {"u2", -1}}));
  EXPECT_LE(M.level(r), 0);
}
