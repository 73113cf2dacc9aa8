#include <gtest/gtest.h>

#include "common.h"
#include "qva/field.h"

using namespace qva;
using qva::test::load;
using qva::test::mono;
using qva::test::Q;

namespace {

bool passed(const CheckReport& r) { return r.status == Status::pass; }

std::string dump(const CheckReport& r) {
  std::string s = r.name + " " + status_name(r.status);
  for (const auto& w : r.witnesses) s += "\n  " + w;
  return s;
}

std::vector<STerm> row_of(const Context& ctx, int u, int v) { return *closed_form_row(ctx, u, v, 24); }

// Scales every x^{-1} coefficient of a row by c.
std::vector<STerm> scale_pole(std::vector<STerm> row, const Rational& c) {
  for (auto& t : row)
    if (t.f.count(-1)) t.f[-1] *= c;
  return row;
}

}  // namespace

TEST(Status, Combine) {
  EXPECT_EQ(combine(Status::pass, Status::inconclusive), Status::inconclusive);
  EXPECT_EQ(combine(Status::inconclusive, Status::fail), Status::fail);
  EXPECT_EQ(combine(Status::pass, Status::pass), Status::pass);
}

TEST(Relations, HeisenbergLevelThreeWindowFour) {
  Context ctx(load("heisenberg-rank1"));
  const auto r = check_structure_relations(ctx, 3, 4);
  EXPECT_TRUE(passed(r)) << dump(r);
}

TEST(Relations, EveryFixture) {
  for (const char* name : {"heisenberg-rank2", "zf-nilpotent", "sl2-affine", "sl2-halfcurrent", "semidirect-borel",
                           "eps-derivation", "cx-derivation"}) {
    Context ctx(load(name));
    const auto r = check_structure_relations(ctx, 2, 3);
    EXPECT_TRUE(passed(r)) << name << "\n" << dump(r);
  }
}

TEST(Relations, TransferToVertexOperatorProducts) {
  // the generator-level brackets, read off at the level of u_n v
  Context aff(load("sl2-affine"));
  ASSERT_TRUE(passed(check_structure_relations(aff, 2, 3)));
  const AlgebraSpec& s = aff.spec();
  const FieldEngine& F = aff.fields();
  const Monomial h{Mode{s.index("h"), -1}}, e{Mode{s.index("e"), -1}}, f{Mode{s.index("f"), -1}};
  EXPECT_EQ(F.mode(h, 1, h), Q(2) * State::vacuum());
  EXPECT_TRUE(F.mode(h, 0, h).is_zero());
  for (int n = 2; n <= 4; ++n) EXPECT_TRUE(F.mode(h, n, h).is_zero());
  EXPECT_EQ(F.mode(e, 0, f), State::basis(h));
  EXPECT_EQ(F.mode(e, 1, f), State::vacuum());

  Context heis(load("heisenberg-rank1"));
  ASSERT_TRUE(passed(check_structure_relations(heis, 2, 3)));
  const AlgebraSpec& hs = heis.spec();
  const Monomial u{Mode{hs.index("u"), -1}}, us{Mode{hs.index("us"), -1}};
  EXPECT_EQ(heis.fields().mode(us, 0, u), State::vacuum());
  for (int n = 1; n <= 3; ++n) EXPECT_TRUE(heis.fields().mode(us, n, u).is_zero());
}

TEST(Slocality, HeisenbergPairsAreFlipsWithKZero) {
  Context ctx(load("heisenberg-rank2"));
  const AlgebraSpec& s = ctx.spec();
  const int u1 = s.index("u1"), u2 = s.index("u2");
  const auto r = find_slocality(ctx, u1, u2, 4, 2, 1, 3);
  ASSERT_TRUE(r.k);
  EXPECT_EQ(*r.k, 0);
  EXPECT_TRUE(r.unique);
  ASSERT_EQ(r.row.size(), 1u);
  EXPECT_EQ(r.row[0].b, u2);
  EXPECT_EQ(r.row[0].a, u1);
  EXPECT_EQ(r.row[0].f, (std::map<int, Rational>{{0, Q(1)}}));
}

TEST(Slocality, AffineEFNeedsKTwoAndTheFlip) {
  Context ctx(load("sl2-affine"));
  const AlgebraSpec& s = ctx.spec();
  const auto r = find_slocality(ctx, s.index("e"), s.index("f"), 4, 2, 1, 3);
  ASSERT_TRUE(r.k);
  EXPECT_EQ(*r.k, 2);
  EXPECT_TRUE(r.unique);
  ASSERT_EQ(r.row.size(), 1u);
  EXPECT_EQ(r.row[0].f, (std::map<int, Rational>{{0, Q(1)}}));
}

TEST(Slocality, HalfCurrentRecoversTheClosedFormRow) {
  Context ctx(load("sl2-halfcurrent"));
  const AlgebraSpec& s = ctx.spec();
  for (int a : ctx.generators())
    for (int b : ctx.generators()) {
      const auto r = find_slocality(ctx, a, b, 4, 2, 1, 3);
      ASSERT_TRUE(r.k) << a << " " << b;
      EXPECT_TRUE(r.unique);
      EXPECT_TRUE(r.k_independent);
      SMap got, want;
      for (const auto& t : r.row)
        for (const auto& [e, c] : t.f) got.add(b, a, t.b, t.a, e, c);
      for (const auto& t : row_of(ctx, a, b))
        for (const auto& [e, c] : t.f) want.add(b, a, t.b, t.a, e, c);
      got.normalize();
      want.normalize();
      EXPECT_EQ(got, want) << s.generators[static_cast<std::size_t>(a)] << "," << s.generators[static_cast<std::size_t>(b)];
    }
}

TEST(Jacobi, FoundRowsSatisfyJacobiInEveryFamily) {
  for (const char* name : {"heisenberg-rank2", "zf-nilpotent", "sl2-affine", "sl2-halfcurrent", "semidirect-borel",
                           "eps-derivation", "cx-derivation"}) {
    Context ctx(load(name));
    for (int u : ctx.generators())
      for (int v : ctx.generators()) {
        const auto r = find_slocality(ctx, u, v, 4, 2, 1, 2);
        ASSERT_TRUE(r.k) << name;
        for (const auto& w : ctx.probes(1)) {
          const auto j = check_s_jacobi(ctx, u, v, w, r.row, 2);
          EXPECT_TRUE(passed(j)) << name << "\n" << dump(j);
        }
      }
  }
}

TEST(Jacobi, AffineClassicalCaseOnTheVacuum) {
  Context ctx(load("sl2-affine"));
  const AlgebraSpec& s = ctx.spec();
  const int e = s.index("e"), f = s.index("f");
  EXPECT_TRUE(passed(check_s_jacobi(ctx, e, f, Monomial{}, row_of(ctx, e, f), 4)));
}

TEST(Jacobi, HalfCurrentOnAState) {
  Context ctx(load("sl2-halfcurrent"));
  const AlgebraSpec& s = ctx.spec();
  const int e = s.index("e"), f = s.index("f");
  const auto row = row_of(ctx, e, f);
  EXPECT_TRUE(passed(check_s_jacobi(ctx, e, f, mono(s, {{"f", -1}}), row, 3)));
}

TEST(Jacobi, WrongRowsAreRejected) {
  Context hc(load("sl2-halfcurrent"));
  const AlgebraSpec& s = hc.spec();
  const int e = s.index("e"), f = s.index("f");
  const auto row = row_of(hc, e, f);
  const Monomial w = mono(s, {{"f", -1}});
  // the same row with the pole terms negated, with them dropped, and doubled
  for (const Rational& c : {Q(-1), Q(0), Q(2)}) {
    const auto j = check_s_jacobi(hc, e, f, w, scale_pole(row, c), 3);
    EXPECT_EQ(j.status, Status::fail) << to_string(c);
    EXPECT_FALSE(j.witnesses.empty());
  }
  // the affine flip scaled by two
  Context aff(load("sl2-affine"));
  auto frow = row_of(aff, e, f);
  for (auto& t : frow)
    for (auto& [k, c] : t.f) c *= 2;
  EXPECT_EQ(check_s_jacobi(aff, e, f, Monomial{}, frow, 3).status, Status::fail);
}

TEST(Assoc, VacuumNeedsNoShift) {
  Context ctx(load("sl2-affine"));
  AssocResult res;
  const auto r = check_weak_assoc(ctx, State::vacuum(), ctx.module().generator_state(0), mono(ctx.spec(), {{"f", -1}}), 4,
                                  3, &res);
  EXPECT_TRUE(passed(r));
  ASSERT_TRUE(res.l);
  EXPECT_EQ(*res.l, 0);
}

TEST(Assoc, HeisenbergAndAffineExamples) {
  {
    Context ctx(load("heisenberg-rank1"));
    const AlgebraSpec& s = ctx.spec();
    AssocResult res;
    const auto r = check_weak_assoc(ctx, State::basis(mono(s, {{"us", -1}})), State::basis(mono(s, {{"u", -1}})),
                                    Monomial{}, 4, 4, &res);
    EXPECT_TRUE(passed(r)) << dump(r);
    ASSERT_TRUE(res.l);
    EXPECT_LE(*res.l, 2);
  }
  {
    Context ctx(load("sl2-affine"));
    const AlgebraSpec& s = ctx.spec();
    AssocResult res;
    const auto r = check_weak_assoc(ctx, State::basis(mono(s, {{"e", -1}})), State::basis(mono(s, {{"f", -1}})),
                                    mono(s, {{"f", -1}}), 4, 4, &res);
    EXPECT_TRUE(passed(r)) << dump(r);
    ASSERT_TRUE(res.l);
    EXPECT_LE(*res.l, 3);
  }
}

TEST(Assoc, ShiftBoundTooSmallIsReported) {
  Context ctx(load("sl2-affine"));
  const AlgebraSpec& s = ctx.spec();
  // e(x0+x2) f(x2) f(-1)|0> needs a shift; l_max = 0 is not enough
  const auto r = check_weak_assoc(ctx, State::basis(mono(s, {{"e", -1}})), State::basis(mono(s, {{"f", -1}})),
                                  mono(s, {{"f", -1}}), 0, 3);
  EXPECT_NE(r.status, Status::pass);
}

TEST(Qyb, IdentityHalfCurrentAndZf) {
  for (const char* name : {"heisenberg-rank2", "sl2-halfcurrent", "zf-nilpotent", "semidirect-borel"}) {
    const AlgebraSpec s = load(name);
    std::vector<int> basis{kVacuum};
    for (int i = 0; i < s.size(); ++i) basis.push_back(i);
    const SMap S = induced_smap(s, 24);
    const int order = s.family == Family::zf ? 4 : 8;
    const auto q = check_qyb(s, S, basis, order);
    const auto u = check_unitarity(s, S, basis, order);
    EXPECT_TRUE(passed(q)) << name << "\n" << dump(q);
    EXPECT_TRUE(passed(u)) << name << "\n" << dump(u);
  }
}

TEST(Qyb, PerturbedOperatorsAreRejected) {
  const AlgebraSpec s = load("sl2-halfcurrent");
  const int e = s.index("e"), h = s.index("h"), f = s.index("f");
  const std::vector<int> basis{kVacuum, e, h, f};
  // a pole term on one row only breaks unitarity
  SMap one = induced_smap(s);
  one.add(f, e, h, kVacuum, -1, 1);
  one.normalize();
  EXPECT_EQ(check_unitarity(s, one, basis, 6).status, Status::fail);
  // rescaling the poles of the (h,e) and (e,h) rows keeps unitarity but breaks the
  // Yang-Baxter equation; rescaling all of them would only rescale x
  SMap scaled = induced_smap(s);
  for (auto key : {std::pair{h, e}, std::pair{e, h}}) scaled.rows[key] = scale_pole(scaled.rows[key], Q(2));
  scaled.normalize();
  EXPECT_EQ(check_unitarity(s, scaled, basis, 6).status, Status::pass);
  EXPECT_EQ(check_qyb(s, scaled, basis, 6).status, Status::fail);
}

TEST(Qyb, OppositePoleSignIsAlsoYangBaxter) {
  // S(-x) solves the same two equations; only S-locality fixes the sign
  const AlgebraSpec s = load("sl2-halfcurrent");
  SMap neg = induced_smap(s);
  for (auto& [key, row] : neg.rows) row = scale_pole(row, Q(-1));
  neg.normalize();
  const std::vector<int> basis{kVacuum, 0, 1, 2};
  EXPECT_EQ(check_qyb(s, neg, basis, 6).status, Status::pass);
  EXPECT_EQ(check_unitarity(s, neg, basis, 6).status, Status::pass);
}

TEST(Extract, OperatorsMatchTheirClosedForms) {
  for (const char* name : {"heisenberg-rank1", "sl2-halfcurrent", "zf-nilpotent"}) {
    Context ctx(load(name));
    SMap S;
    const auto r = extract_qyb_operator(ctx, 4, 2, 1, 3, &S);
    EXPECT_TRUE(passed(r)) << name << "\n" << dump(r);
    bool matched = false;
    for (const auto& [k, v] : r.details)
      if (k == "matches_closed_form") matched = v == "yes";
    EXPECT_TRUE(matched) << name;
  }
}

TEST(KerD, DimensionsAndTheDegenerateAlgebra) {
  auto dim = [](const CheckReport& r) {
    for (const auto& [k, v] : r.details)
      if (k == "dim_ker_D") return std::stol(v);
    return -1L;
  };
  const auto aff = ker_d_probe(Context(load("sl2-affine")), 2);
  EXPECT_EQ(dim(aff), 1);
  EXPECT_TRUE(passed(aff));
  EXPECT_EQ(dim(ker_d_probe(Context(load("heisenberg-rank1")), 2)), 1);
  const auto eps = ker_d_probe(Context(load("eps-derivation")), 2);
  EXPECT_EQ(dim(eps), 2);
  EXPECT_EQ(eps.status, Status::fail);
}

TEST(Filtration, ContainmentsHoldInEveryFixture) {
  for (const char* name : {"heisenberg-rank1", "heisenberg-rank2", "zf-nilpotent", "sl2-affine", "sl2-halfcurrent",
                           "semidirect-borel", "eps-derivation", "cx-derivation"}) {
    const auto r = check_filtration(Context(load(name)), 3);
    EXPECT_TRUE(passed(r)) << name << "\n" << dump(r);
  }
}

TEST(Filtration, SpecificContainments) {
  const AlgebraSpec h = load("heisenberg-rank1");
  ModuleEngine M(h);
  EXPECT_LE(M.level(M.apply_mode(h.index("us"), 0, mono(h, {{"u", -1}}))), 0);
  for (const auto& w : M.enumerate_basis(1))
    for (int a = 0; a < h.size(); ++a) EXPECT_LE(M.level(M.apply_mode(a, -2, w)), 3);
}

TEST(GrDims, FreeFamiliesPassAndDerivationIsInconclusive) {
  EXPECT_TRUE(passed(gr_dims_check(Context(load("zf-nilpotent")), 4)));
  EXPECT_TRUE(passed(gr_dims_check(Context(load("heisenberg-rank1")), 4)));
  EXPECT_EQ(gr_dims_check(Context(load("cx-derivation")), 3).status, Status::inconclusive);
}
