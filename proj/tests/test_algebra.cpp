#include <gtest/gtest.h>

#include "common.h"

using namespace qva;
using qva::test::load;
using qva::test::Q;

namespace {

const std::vector<std::string> kValid{"sl2-affine",     "sl2-halfcurrent", "heisenberg-rank1", "heisenberg-rank2",
                                      "zf-nilpotent",   "eps-derivation",  "cx-derivation",    "semidirect-borel"};

bool has_error(const ValidationResult& v, const std::string& check) {
  for (const auto& d : v.diagnostics)
    if (d.severity == Diagnostic::Severity::error && d.check == check) return true;
  return false;
}

const char* kSl2 = R"(
[algebra]
family = affine
level = 1
generators = e h f
bracket e f = h
bracket h e = 2 e
bracket h f = -2 f
form e f = 1
form h h = 2
)";

}  // namespace

TEST(Spec, FixturesValidateAndRoundTrip) {
  for (const auto& name : kValid) {
    SCOPED_TRACE(name);
    const AlgebraSpec s = load(name);
    EXPECT_TRUE(validate(s).ok());
    EXPECT_EQ(parse_spec(print_spec(s)), s);
  }
}

TEST(Spec, Sl2TextIsAcceptedWithoutDiagnostics) {
  const AlgebraSpec s = parse_spec(kSl2);
  EXPECT_EQ(s.family, Family::affine);
  EXPECT_TRUE(validate(s).diagnostics.empty());
  EXPECT_EQ(s.bracket_of(s.index("f"), s.index("e")), (LinComb{{s.index("h"), Q(-1)}}));
  EXPECT_EQ(s.form_of(s.index("f"), s.index("e")), 1);
}

TEST(Spec, UndeclaredGeneratorIsAPositionedError) {
  std::string text = kSl2;
  text += "bracket e g4 = h\n";
  try {
    parse_spec(text);
    FAIL() << "accepted an undeclared generator";
  } catch (const SpecError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 11:", 0), 0u) << e.what();
    EXPECT_NE(std::string(e.what()).find("g4"), std::string::npos);
  }
}

TEST(Spec, AntisymmetryViolation) {
  std::string text = kSl2;
  text += "bracket f e = h\n";
  EXPECT_TRUE(has_error(validate(parse_spec(text)), "antisymmetry"));
}

TEST(Spec, MutatedFixtureIsRejected) { EXPECT_TRUE(has_error(validate(load("sl2-mutated")), "jacobi")); }

TEST(Spec, EverySingleCoefficientMutationOfSl2IsRejected) {
  const AlgebraSpec base = load("sl2-affine");
  int tried = 0;
  for (const auto& [key, lc] : base.bracket)
    for (std::size_t t = 0; t < lc.size(); ++t)
      for (const Rational& delta : {Q(1), Q(-1), Q(1, 2), Q(-3)}) {
        AlgebraSpec s = base;
        s.bracket[key][t].second += delta;
        EXPECT_FALSE(validate(s).ok()) << "bracket " << key.first << "," << key.second;
        ++tried;
      }
  for (const auto& [key, v] : base.form)
    for (const Rational& delta : {Q(1), Q(-1), Q(1, 2)}) {
      AlgebraSpec s = base;
      s.form[key] += delta;
      EXPECT_FALSE(validate(s).ok()) << "form " << key.first << "," << key.second;
      ++tried;
    }
  EXPECT_GT(tried, 15);
}

TEST(Spec, NonCommutingRMatrixCoefficients) {
  AlgebraSpec s = load("zf-nilpotent");
  QMatrix r2(2, 2);
  r2(1, 0) = 1;  // N^T does not commute with N
  s.rmatrix->R.push_back(r2);
  s.rmatrix->order = 2;
  const auto v = validate(s);
  EXPECT_TRUE(has_error(v, "r-commute"));
}

TEST(Spec, SemidirectRejectsANonInvariantForm) {
  AlgebraSpec s = load("semidirect-borel");
  s.form[{s.index("E"), s.index("F")}] = 1;  // <[h,E],F> = 2 <E,F> != 0
  EXPECT_TRUE(has_error(validate(s), "form-invariance"));
}

TEST(RMatrix, InverseOfUnipotentSeries) {
  const RMatrix r = load("zf-nilpotent").r_matrix();
  QMatrix N(2, 2);
  N(0, 1) = 1;
  EXPECT_EQ(r.inverse_coeff(0), QMatrix::identity(2));
  EXPECT_EQ(r.inverse_coeff(1), N.scaled(-1));
  for (int k = 2; k <= 6; ++k) EXPECT_TRUE(r.inverse_coeff(k).is_zero()) << k;
  // R R^{-1} = 1 coefficientwise, by truncated convolution
  for (int k = 0; k <= 6; ++k) {
    QMatrix acc(2, 2);
    for (int i = 0; i <= k; ++i) acc = acc + r.coeff(i) * r.inverse_coeff(k - i);
    EXPECT_EQ(acc, k == 0 ? QMatrix::identity(2) : QMatrix(2, 2)) << k;
  }
}

TEST(RMatrix, TruncatedSeriesRefusesCoefficientsPastItsOrder) {
  AlgebraSpec s = load("zf-nilpotent");
  s.rmatrix->truncated = true;
  const RMatrix r = s.r_matrix();
  EXPECT_NO_THROW(r.inverse_coeff(1));
  EXPECT_THROW(r.inverse_coeff(2), OrderExceeded);
}

TEST(InducedS, HeisenbergIsTheFlip) {
  const AlgebraSpec s = load("heisenberg-rank2");
  const SMap m = induced_smap(s);
  for (int b = 0; b < s.size(); ++b)
    for (int a = 0; a < s.size(); ++a) {
      const auto row = m.row_or_identity(b, a);
      ASSERT_EQ(row.size(), 1u);
      EXPECT_EQ(row[0].b, b);
      EXPECT_EQ(row[0].a, a);
      EXPECT_EQ(row[0].f, (std::map<int, Rational>{{0, Q(1)}}));
    }
}

TEST(InducedS, HalfCurrentRowForFAndE) {
  const AlgebraSpec s = load("sl2-halfcurrent");
  const int e = s.index("e"), h = s.index("h"), f = s.index("f");
  const auto row = induced_smap(s).row_or_identity(f, e);
  std::map<std::pair<int, int>, std::map<int, Rational>> got;
  for (const auto& t : row) got[{t.b, t.a}] = t.f;
  // f (x) e + x^{-1} (h (x) 1 - 1 (x) h); the sign is the one find_slocality recovers
  const std::map<std::pair<int, int>, std::map<int, Rational>> want{
      {{f, e}, {{0, Q(1)}}}, {{h, kVacuum}, {{-1, Q(1)}}}, {{kVacuum, h}, {{-1, Q(-1)}}}};
  EXPECT_EQ(got, want);
}

TEST(InducedS, ZfBlockOnUIsRMinusXTimesRInverse) {
  const AlgebraSpec s = load("zf-nilpotent");
  const RMatrix r = s.r_matrix();
  const int order = 6;
  const SMap m = induced_smap(s, order);
  const auto& U = s.rmatrix->U;
  for (int jb = 0; jb < 2; ++jb)
    for (int ja = 0; ja < 2; ++ja) {
      // oracle: sum_k x^k sum_{i+j=k} (-1)^i R_i[:, jb] (x) Rinv_j[:, ja]
      std::map<std::pair<int, int>, std::map<int, Rational>> want;
      for (int k = 0; k <= order; ++k)
        for (int i = 0; i <= k; ++i)
          for (int ib = 0; ib < 2; ++ib)
            for (int ia = 0; ia < 2; ++ia) {
              Rational c = r.coeff(i)(ib, jb) * r.inverse_coeff(k - i)(ia, ja);
              if (i % 2) c = -c;
              if (!is_zero(c)) want[{U[static_cast<std::size_t>(ib)], U[static_cast<std::size_t>(ia)]}][k] += c;
            }
      std::map<std::pair<int, int>, std::map<int, Rational>> got;
      for (const auto& t : m.row_or_identity(U[static_cast<std::size_t>(jb)], U[static_cast<std::size_t>(ja)]))
        for (const auto& [e, c] : t.f)
          if (e <= order && !is_zero(c)) got[{t.b, t.a}][e] += c;
      EXPECT_EQ(got, want) << jb << "," << ja;
    }
}

TEST(InducedS, DerivationFamilyHasNoClosedForm) {
  EXPECT_THROW(induced_smap(load("eps-derivation")), NoClosedForm);
}
