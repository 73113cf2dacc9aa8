#include <algorithm>
#include <set>
#include <sstream>

#include "qva/algebra.h"

namespace qva {

// ------------------------------------------------------------------ LinComb

void lincomb_add(LinComb& into, int idx, const Rational& c) {
  if (qva::is_zero(c)) return;
  auto it = std::lower_bound(into.begin(), into.end(), idx,
                             [](const std::pair<int, Rational>& p, int i) { return p.first < i; });
  if (it != into.end() && it->first == idx) {
    it->second += c;
    if (qva::is_zero(it->second)) into.erase(it);
  } else {
    into.insert(it, {idx, c});
  }
}

LinComb lincomb_scaled(const LinComb& a, const Rational& c) {
  LinComb r;
  if (qva::is_zero(c)) return r;
  for (const auto& [i, v] : a) r.emplace_back(i, v * c);
  return r;
}

// ------------------------------------------------------------------ QMatrix

QMatrix::QMatrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<std::size_t>(rows * cols)) {}

QMatrix QMatrix::identity(int n) {
  QMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::operator*(const QMatrix& o) const {
  if (c_ != o.r_) throw std::invalid_argument("matrix size mismatch");
  QMatrix m(r_, o.c_);
  for (int i = 0; i < r_; ++i)
    for (int k = 0; k < c_; ++k) {
      const Rational& x = (*this)(i, k);
      if (qva::is_zero(x)) continue;
      for (int j = 0; j < o.c_; ++j) m(i, j) += x * o(k, j);
    }
  return m;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
  if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("matrix size mismatch");
  QMatrix m = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += o.a_[i];
  return m;
}

QMatrix QMatrix::operator-(const QMatrix& o) const { return *this + o.scaled(-1); }

QMatrix QMatrix::scaled(const Rational& c) const {
  QMatrix m = *this;
  for (auto& x : m.a_) x *= c;
  return m;
}

QMatrix QMatrix::transposed() const {
  QMatrix m(c_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

std::optional<QMatrix> QMatrix::inverse() const {
  if (r_ != c_) return std::nullopt;
  const int n = r_;
  QMatrix a = *this, inv = identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (!qva::is_zero(a(i, col))) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const Rational p = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || qva::is_zero(a(i, col))) continue;
      const Rational f = a(i, col);
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

bool QMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Rational& x) { return qva::is_zero(x); });
}

// ------------------------------------------------------------------ RMatrix

RMatrix::RMatrix(std::vector<QMatrix> coeffs, bool truncated, QMatrix pairing)
    : coeffs_(std::move(coeffs)), truncated_(truncated), pairing_(std::move(pairing)) {
  if (coeffs_.empty()) throw std::invalid_argument("R(x) needs at least R0");
}

RMatrix::RMatrix(const RMatrix& o) {
  std::lock_guard<std::mutex> lock(o.mu_);
  coeffs_ = o.coeffs_;
  truncated_ = o.truncated_;
  pairing_ = o.pairing_;
  inv_ = o.inv_;
}

RMatrix& RMatrix::operator=(const RMatrix& o) {
  if (this == &o) return *this;
  std::scoped_lock lock(mu_, o.mu_);
  coeffs_ = o.coeffs_;
  truncated_ = o.truncated_;
  pairing_ = o.pairing_;
  inv_ = o.inv_;
  return *this;
}

void RMatrix::check_order(int k) const {
  if (truncated_ && k > order())
    throw OrderExceeded("R-matrix coefficient of order " + std::to_string(k) + " requested, R is known to order " +
                        std::to_string(order()));
}

QMatrix RMatrix::coeff(int k) const {
  check_order(k);
  if (k < 0 || k > order()) return QMatrix(dim(), dim());
  return coeffs_[static_cast<std::size_t>(k)];
}

QMatrix RMatrix::inverse_coeff(int k) const {
  check_order(k);
  if (k < 0) return QMatrix(dim(), dim());
  std::lock_guard<std::mutex> lock(mu_);
  if (inv_.empty()) {
    auto r0 = coeffs_[0].inverse();
    if (!r0) throw std::domain_error("R0 is not invertible");
    inv_.push_back(*r0);
  }
  // (R^{-1})_k = -R0^{-1} sum_{i=1..k} R_i (R^{-1})_{k-i}
  while (static_cast<int>(inv_.size()) <= k) {
    const int n = static_cast<int>(inv_.size());
    QMatrix acc(dim(), dim());
    for (int i = 1; i <= std::min(n, order()); ++i)
      acc = acc + coeffs_[static_cast<std::size_t>(i)] * inv_[static_cast<std::size_t>(n - i)];
    inv_.push_back((inv_[0] * acc).scaled(-1));
  }
  return inv_[static_cast<std::size_t>(k)];
}

QMatrix RMatrix::dual(const QMatrix& m) const {
  // <M v_i, u_j> = <v_i, m u_j>  gives  M = P^{-T} m^T P^T
  auto pinv = pairing_.inverse();
  if (!pinv) throw std::domain_error("pairing between U* and U is degenerate");
  return pinv->transposed() * m.transposed() * pairing_.transposed();
}

QMatrix RMatrix::star_coeff(int k) const { return dual(inverse_coeff(k)); }
QMatrix RMatrix::star_inverse_coeff(int k) const { return dual(coeff(k)); }

// -------------------------------------------------------------- AlgebraSpec

int AlgebraSpec::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw SpecError("unknown generator '" + name + "'");
  return *i;
}

std::optional<int> AlgebraSpec::find(const std::string& name) const {
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (generators[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

LinComb AlgebraSpec::bracket_of(int a, int b) const {
  auto it = bracket.find({a, b});
  if (it != bracket.end()) return it->second;
  it = bracket.find({b, a});
  if (it != bracket.end()) return lincomb_scaled(it->second, -1);
  return {};
}

Rational AlgebraSpec::form_of(int a, int b) const {
  auto it = form.find({a, b});
  if (it != form.end()) return it->second;
  it = form.find({b, a});
  if (it == form.end()) return 0;
  const bool skew = family == Family::heisenberg || family == Family::zf;
  return skew ? Rational(-it->second) : it->second;
}

LinComb AlgebraSpec::mult_of(int a, int b) const {
  if (!derivation) return {};
  auto it = derivation->mult.find({a, b});
  return it == derivation->mult.end() ? LinComb{} : it->second;
}

LinComb AlgebraSpec::d_of(int a) const {
  if (!derivation) return {};
  auto it = derivation->d.find(a);
  return it == derivation->d.end() ? LinComb{} : it->second;
}

std::optional<int> AlgebraSpec::unit() const {
  if (!derivation) return std::nullopt;
  for (int e = 0; e < size(); ++e) {
    bool ok = true;
    for (int b = 0; b < size() && ok; ++b) {
      LinComb want{{b, Rational(1)}};
      ok = mult_of(e, b) == want && mult_of(b, e) == want;
    }
    if (ok) return e;
  }
  return std::nullopt;
}

int AlgebraSpec::grade_of(int a) const {
  if (derivation) {
    auto it = derivation->grade.find(a);
    if (it != derivation->grade.end()) return it->second;
    auto u = unit();
    if (u && *u == a) return 0;
  }
  return 1;
}

bool AlgebraSpec::has_nonnegative_modes(int a) const {
  switch (family) {
    case Family::half_current:
    case Family::derivation:
      return false;
    case Family::semidirect:
      return std::find(semidirect->ideal.begin(), semidirect->ideal.end(), a) != semidirect->ideal.end();
    default:
      return true;
  }
}

bool AlgebraSpec::in_dual(int a) const {
  if (!rmatrix) return false;
  return std::find(rmatrix->dual.begin(), rmatrix->dual.end(), a) != rmatrix->dual.end();
}

RMatrix AlgebraSpec::r_matrix() const {
  if (!rmatrix) throw SpecError("spec has no [rmatrix] section");
  const auto& z = *rmatrix;
  const int n = static_cast<int>(z.U.size());
  QMatrix P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = form_of(z.dual[static_cast<std::size_t>(i)], z.U[static_cast<std::size_t>(j)]);
  return RMatrix(z.R, z.truncated, P);
}

bool AlgebraSpec::operator==(const AlgebraSpec& o) const {
  auto zf_eq = [](const std::optional<ZfData>& a, const std::optional<ZfData>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->order == b->order && a->truncated == b->truncated && a->R == b->R && a->U == b->U &&
           a->dual == b->dual;
  };
  auto sd_eq = [](const std::optional<SemidirectData>& a, const std::optional<SemidirectData>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->ideal == b->ideal && a->subalgebra == b->subalgebra);
  };
  auto dd_eq = [](const std::optional<DerivationData>& a, const std::optional<DerivationData>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->mult == b->mult && a->d == b->d && a->grade == b->grade && a->degree_bound == b->degree_bound);
  };
  return family == o.family && level == o.level && generators == o.generators && bracket == o.bracket &&
         form == o.form && zf_eq(rmatrix, o.rmatrix) && sd_eq(semidirect, o.semidirect) &&
         dd_eq(derivation, o.derivation);
}

// --------------------------------------------------------------- validation

bool ValidationResult::ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::error; });
}

namespace {

LinComb add(LinComb a, const LinComb& b, const Rational& c = 1) {
  for (const auto& [i, v] : b) lincomb_add(a, i, v * c);
  return a;
}

LinComb br(const AlgebraSpec& s, const LinComb& x, const LinComb& y) {
  LinComb r;
  for (const auto& [i, a] : x)
    for (const auto& [j, b] : y) r = add(r, s.bracket_of(i, j), a * b);
  return r;
}

Rational form(const AlgebraSpec& s, const LinComb& x, const LinComb& y) {
  Rational r = 0;
  for (const auto& [i, a] : x)
    for (const auto& [j, b] : y) r += a * b * s.form_of(i, j);
  return r;
}

LinComb mult(const AlgebraSpec& s, const LinComb& x, const LinComb& y) {
  LinComb r;
  for (const auto& [i, a] : x)
    for (const auto& [j, b] : y) r = add(r, s.mult_of(i, j), a * b);
  return r;
}

LinComb dmap(const AlgebraSpec& s, const LinComb& x) {
  LinComb r;
  for (const auto& [i, a] : x) r = add(r, s.d_of(i), a);
  return r;
}

LinComb single(int i) { return LinComb{{i, Rational(1)}}; }

class Diags {
 public:
  explicit Diags(const AlgebraSpec& s) : s_(s) {}
  void error(const std::string& check, const std::string& msg) {
    out.push_back({Diagnostic::Severity::error, check, msg});
  }
  void warning(const std::string& check, const std::string& msg) {
    out.push_back({Diagnostic::Severity::warning, check, msg});
  }
  std::string n(int i) const { return s_.generators[static_cast<std::size_t>(i)]; }
  std::vector<Diagnostic> out;

 private:
  const AlgebraSpec& s_;
};

void check_lie(const AlgebraSpec& s, Diags& d, const std::vector<int>& gens) {
  for (const auto& [k, v] : s.bracket) {
    if (k.first == k.second && !v.empty())
      d.error("antisymmetry", "[" + d.n(k.first) + "," + d.n(k.first) + "] must vanish");
    auto it = s.bracket.find({k.second, k.first});
    if (k.first < k.second && it != s.bracket.end() && add(v, it->second) != LinComb{})
      d.error("antisymmetry", "[" + d.n(k.first) + "," + d.n(k.second) + "] != -[" + d.n(k.second) + "," +
                                  d.n(k.first) + "]");
  }
  for (std::size_t x = 0; x < gens.size(); ++x)
    for (std::size_t y = x + 1; y < gens.size(); ++y)
      for (std::size_t z = y + 1; z < gens.size(); ++z) {
        const int a = gens[x], b = gens[y], c = gens[z];
        LinComb j = br(s, single(a), s.bracket_of(b, c));
        j = add(j, br(s, single(b), s.bracket_of(c, a)));
        j = add(j, br(s, single(c), s.bracket_of(a, b)));
        if (!j.empty()) d.error("jacobi", "Jacobi identity fails on (" + d.n(a) + "," + d.n(b) + "," + d.n(c) + ")");
      }
}

void check_symmetric_invariant(const AlgebraSpec& s, Diags& d, const std::vector<int>& gens) {
  for (const auto& [k, v] : s.form) {
    auto it = s.form.find({k.second, k.first});
    if (it != s.form.end() && it->second != v)
      d.error("form-symmetry", "<" + d.n(k.first) + "," + d.n(k.second) + "> != <" + d.n(k.second) + "," +
                                   d.n(k.first) + ">");
  }
  for (int a : gens)
    for (int b : gens)
      for (int c : gens)
        if (form(s, s.bracket_of(a, b), single(c)) != form(s, single(a), s.bracket_of(b, c)))
          d.error("form-invariance",
                  "<[" + d.n(a) + "," + d.n(b) + "]," + d.n(c) + "> != <" + d.n(a) + ",[" + d.n(b) + "," + d.n(c) + "]>");
}

void check_skew(const AlgebraSpec& s, Diags& d) {
  for (const auto& [k, v] : s.form) {
    if (k.first == k.second && !qva::is_zero(v)) d.error("form-skew", "<" + d.n(k.first) + "," + d.n(k.first) + "> must vanish");
    auto it = s.form.find({k.second, k.first});
    if (it != s.form.end() && it->second != -v)
      d.error("form-skew", "<" + d.n(k.first) + "," + d.n(k.second) + "> != -<" + d.n(k.second) + "," +
                               d.n(k.first) + ">");
  }
}

void check_no_brackets(const AlgebraSpec& s, Diags& d) {
  if (!s.bracket.empty()) d.error("structure", family_name(s.family) + " specs take no bracket lines");
}

void check_zf(const AlgebraSpec& s, Diags& d) {
  check_no_brackets(s, d);
  check_skew(s, d);
  if (!s.rmatrix) {
    d.error("rmatrix", "zf-rmatrix spec needs an [rmatrix] section");
    return;
  }
  const auto& z = *s.rmatrix;
  const int n = z.R.empty() ? 0 : z.R[0].rows();
  if (static_cast<int>(z.U.size()) != n || static_cast<int>(z.dual.size()) != n) {
    d.error("rmatrix", "U and dual must each list " + std::to_string(n) + " generators");
    return;
  }
  std::set<int> all(z.U.begin(), z.U.end());
  all.insert(z.dual.begin(), z.dual.end());
  if (static_cast<int>(all.size()) != s.size() || static_cast<int>(all.size()) != 2 * n)
    d.error("rmatrix", "U and dual must partition the generators");
  if (!z.R[0].inverse()) d.error("r0-invertible", "R0 is not invertible");
  for (std::size_t i = 0; i < z.R.size(); ++i)
    for (std::size_t j = i + 1; j < z.R.size(); ++j)
      if (!(z.R[i] * z.R[j] - z.R[j] * z.R[i]).is_zero())
        d.error("r-commute", "[R" + std::to_string(i) + ",R" + std::to_string(j) + "] != 0");
  for (int a : z.U)
    for (int b : z.U)
      if (!qva::is_zero(s.form_of(a, b))) d.error("form-split", "<" + d.n(a) + "," + d.n(b) + "> must vanish on U x U");
  for (int a : z.dual)
    for (int b : z.dual)
      if (!qva::is_zero(s.form_of(a, b))) d.error("form-split", "<" + d.n(a) + "," + d.n(b) + "> must vanish on U* x U*");
  QMatrix P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = s.form_of(z.dual[static_cast<std::size_t>(i)], z.U[static_cast<std::size_t>(j)]);
  if (!P.inverse()) d.error("form-split", "pairing between U* and U is degenerate");
}

void check_semidirect(const AlgebraSpec& s, Diags& d) {
  if (!s.semidirect) {
    d.error("semidirect", "semidirect spec needs a [semidirect] section");
    return;
  }
  const auto& sd = *s.semidirect;
  std::set<int> K(sd.ideal.begin(), sd.ideal.end()), G(sd.subalgebra.begin(), sd.subalgebra.end());
  std::set<int> all = K;
  all.insert(G.begin(), G.end());
  if (K.size() != sd.ideal.size() || G.size() != sd.subalgebra.size() || all.size() != K.size() + G.size() ||
      static_cast<int>(all.size()) != s.size())
    d.error("semidirect", "ideal and subalgebra must partition the generators");
  std::vector<int> gens(all.begin(), all.end());
  check_lie(s, d, gens);
  auto inside = [](const LinComb& c, const std::set<int>& set) {
    return std::all_of(c.begin(), c.end(), [&](const auto& p) { return set.count(p.first) > 0; });
  };
  for (int a : G)
    for (int b : G)
      if (!inside(s.bracket_of(a, b), G)) d.error("subalgebra", "[" + d.n(a) + "," + d.n(b) + "] leaves the subalgebra");
  for (int a : G)
    for (int u : K)
      if (!inside(s.bracket_of(a, u), K)) d.error("semidirect", "[" + d.n(a) + "," + d.n(u) + "] leaves the ideal");
  for (int u : K)
    for (int v : K)
      if (!inside(s.bracket_of(u, v), K)) d.error("ideal", "[" + d.n(u) + "," + d.n(v) + "] leaves the ideal");
  for (const auto& [k, v] : s.form)
    if (!K.count(k.first) || !K.count(k.second))
      d.error("form-support", "form entry <" + d.n(k.first) + "," + d.n(k.second) + "> outside the ideal");
  std::vector<int> kv(K.begin(), K.end());
  check_symmetric_invariant(s, d, kv);
  // The form extended by zero to K + g must stay invariant, which forces
  // <[a,u],v> = <a,[u,v]> = 0; otherwise the level-l cocycle on K clashes
  // with the negative modes of g.
  for (int a : G)
    for (int u : K)
      for (int v : K)
        if (form(s, s.bracket_of(a, u), single(v)) != 0)
          d.error("form-invariance", "<[" + d.n(a) + "," + d.n(u) + "]," + d.n(v) + "> must vanish");
}

void check_derivation(const AlgebraSpec& s, Diags& d) {
  check_no_brackets(s, d);
  if (!s.derivation) {
    d.error("derivation", "derivation-assoc spec needs a [derivation] section");
    return;
  }
  auto u = s.unit();
  if (!u) d.error("unit", "multiplication table has no two-sided unit");
  const int n = s.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (mult(s, s.mult_of(a, b), single(c)) != mult(s, single(a), s.mult_of(b, c)))
          d.error("associativity", "(" + d.n(a) + d.n(b) + ")" + d.n(c) + " != " + d.n(a) + "(" + d.n(b) + d.n(c) + ")");
  // With a declared degree bound the table is a truncation, and Leibniz only
  // has to hold away from the cut.
  const bool truncation = s.derivation->degree_bound.has_value();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      LinComb lhs = dmap(s, s.mult_of(a, b));
      LinComb rhs = add(mult(s, s.d_of(a), single(b)), mult(s, single(a), s.d_of(b)));
      if (lhs == rhs) continue;
      const std::string msg = "d(" + d.n(a) + d.n(b) + ") != d(" + d.n(a) + ")" + d.n(b) + " + " + d.n(a) + "d(" + d.n(b) + ")";
      if (truncation && s.grade_of(a) + s.grade_of(b) >= *s.derivation->degree_bound)
        d.warning("leibniz", msg + " (beyond degree bound)");
      else
        d.error("leibniz", msg);
    }
  if (u && !s.d_of(*u).empty()) d.error("leibniz", "derivation does not kill the unit");
}

}  // namespace

ValidationResult validate(const AlgebraSpec& s) {
  Diags d(s);
  std::vector<int> all(static_cast<std::size_t>(s.size()));
  for (int i = 0; i < s.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  switch (s.family) {
    case Family::affine:
      check_lie(s, d, all);
      check_symmetric_invariant(s, d, all);
      break;
    case Family::half_current:
      check_lie(s, d, all);
      if (!s.form.empty()) d.warning("form", "half-current specs ignore the form");
      break;
    case Family::heisenberg:
      check_no_brackets(s, d);
      check_skew(s, d);
      break;
    case Family::zf:
      check_zf(s, d);
      break;
    case Family::semidirect:
      check_semidirect(s, d);
      break;
    case Family::derivation:
      check_derivation(s, d);
      break;
  }
  if (s.rmatrix && s.family != Family::zf) d.warning("rmatrix", "[rmatrix] is only used by zf-rmatrix specs");
  return ValidationResult{std::move(d.out)};
}

// --------------------------------------------------------------------- SMap

const std::vector<STerm>* SMap::row(int b, int a) const {
  auto it = rows.find({b, a});
  return it == rows.end() ? nullptr : &it->second;
}

std::vector<STerm> SMap::row_or_identity(int b, int a) const {
  if (auto r = row(b, a)) return *r;
  if (b == kVacuum || a == kVacuum) return {STerm{b, a, {{0, Rational(1)}}}};
  throw std::out_of_range("S(x) has no row for this generator pair");
}

void SMap::add(int b, int a, int bo, int ao, int exponent, const Rational& c) {
  if (qva::is_zero(c)) return;
  auto& r = rows[{b, a}];
  for (auto& t : r)
    if (t.b == bo && t.a == ao) {
      t.f[exponent] += c;
      if (qva::is_zero(t.f[exponent])) t.f.erase(exponent);
      return;
    }
  r.push_back(STerm{bo, ao, {{exponent, c}}});
}

void SMap::normalize() {
  for (auto& [k, r] : rows) {
    std::vector<STerm> merged;
    for (const auto& t : r) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const STerm& m) { return m.b == t.b && m.a == t.a; });
      if (it == merged.end()) {
        merged.push_back(STerm{t.b, t.a, {}});
        it = merged.end() - 1;
      }
      for (const auto& [e, c] : t.f) it->f[e] += c;
    }
    for (auto& t : merged)
      for (auto it = t.f.begin(); it != t.f.end();) it = qva::is_zero(it->second) ? t.f.erase(it) : std::next(it);
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const STerm& t) { return t.f.empty(); }), merged.end());
    std::sort(merged.begin(), merged.end(), [](const STerm& x, const STerm& y) {
      return std::make_pair(x.b, x.a) < std::make_pair(y.b, y.a);
    });
    r = std::move(merged);
  }
}

bool SMap::operator==(const SMap& o) const {
  SMap x = *this, y = o;
  x.normalize();
  y.normalize();
  if (x.rows.size() != y.rows.size()) return false;
  for (const auto& [k, r] : x.rows) {
    auto it = y.rows.find(k);
    if (it == y.rows.end() || it->second.size() != r.size()) return false;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i].b != it->second[i].b || r[i].a != it->second[i].a || r[i].f != it->second[i].f) return false;
  }
  return true;
}

namespace {

void add_vacuum_rows(SMap& s, int n) {
  s.add(kVacuum, kVacuum, kVacuum, kVacuum, 0, 1);
  for (int a = 0; a < n; ++a) {
    s.add(kVacuum, a, kVacuum, a, 0, 1);
    s.add(a, kVacuum, a, kVacuum, 0, 1);
  }
}

// Half-current rule: S(b (x) a) = b (x) a + x^{-1}(1 (x) [b,a] - [b,a] (x) 1)
void half_current_row(const AlgebraSpec& spec, SMap& s, int b, int a) {
  s.add(b, a, b, a, 0, 1);
  for (const auto& [g, c] : spec.bracket_of(b, a)) {
    s.add(b, a, kVacuum, g, -1, c);
    s.add(b, a, g, kVacuum, -1, -c);
  }
}

}  // namespace

SMap induced_smap(const AlgebraSpec& spec, int order) {
  SMap s;
  const int n = spec.size();
  switch (spec.family) {
    case Family::affine:
    case Family::heisenberg:
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) s.add(b, a, b, a, 0, 1);
      break;
    case Family::half_current:
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) half_current_row(spec, s, b, a);
      add_vacuum_rows(s, n);
      break;
    case Family::semidirect: {
      const auto& sd = *spec.semidirect;
      auto in_k = [&](int x) { return std::find(sd.ideal.begin(), sd.ideal.end(), x) != sd.ideal.end(); };
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          if (in_k(b) && in_k(a)) {
            s.add(b, a, b, a, 0, 1);
          } else if (!in_k(b) && !in_k(a)) {
            half_current_row(spec, s, b, a);
          } else if (in_k(b)) {
            // half-current field a against a full field b:  b (x) a + x^{-1} [a,b] (x) 1
            s.add(b, a, b, a, 0, 1);
            for (const auto& [g, c] : spec.bracket_of(a, b)) s.add(b, a, g, kVacuum, -1, c);
          } else {
            // full field a against a half-current field b:  b (x) a + x^{-1} 1 (x) [b,a]
            s.add(b, a, b, a, 0, 1);
            for (const auto& [g, c] : spec.bracket_of(b, a)) s.add(b, a, kVacuum, g, -1, c);
          }
        }
      add_vacuum_rows(s, n);
      break;
    }
    case Family::zf: {
      const auto& z = *spec.rmatrix;
      const RMatrix R = spec.r_matrix();
      const int N = order < 0 ? z.order : order;
      const int dim = static_cast<int>(z.U.size());
      auto pos = [&](int g) {
        for (int i = 0; i < dim; ++i) {
          if (z.U[static_cast<std::size_t>(i)] == g) return std::make_pair(false, i);
          if (z.dual[static_cast<std::size_t>(i)] == g) return std::make_pair(true, i);
        }
        throw SpecError("generator outside U and U*");
      };
      // series(first dual?, second dual?) -> (M1, M2) with S(b (x) a) = M1(-x) b (x) M2(x) a
      auto m1 = [&](bool bd, bool ad, int k) {
        if (!bd && !ad) return R.coeff(k);
        if (bd && ad) return R.star_inverse_coeff(k);
        if (bd && !ad) return R.star_coeff(k);
        return R.inverse_coeff(k);
      };
      auto m2 = [&](bool bd, bool ad, int k) {
        if (!bd && !ad) return R.inverse_coeff(k);
        if (bd && ad) return R.star_coeff(k);
        if (bd && !ad) return R.coeff(k);
        return R.star_inverse_coeff(k);
      };
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          auto [bd, bi] = pos(b);
          auto [ad, ai] = pos(a);
          const auto& bbasis = bd ? z.dual : z.U;
          const auto& abasis = ad ? z.dual : z.U;
          for (int j = 0; j <= N; ++j)
            for (int sidx = 0; sidx <= j; ++sidx) {
              const QMatrix A = m1(bd, ad, sidx), B = m2(bd, ad, j - sidx);
              const Rational sign = sidx % 2 ? -1 : 1;
              for (int k = 0; k < dim; ++k) {
                if (qva::is_zero(A(k, bi))) continue;
                for (int l = 0; l < dim; ++l) {
                  if (qva::is_zero(B(l, ai))) continue;
                  s.add(b, a, bbasis[static_cast<std::size_t>(k)], abasis[static_cast<std::size_t>(l)], j,
                        sign * A(k, bi) * B(l, ai));
                }
              }
            }
        }
      s.exact_to = N;
      break;
    }
    case Family::derivation:
      throw NoClosedForm("derivation-assoc specs have no closed-form S; use find-slocality");
  }
  s.normalize();
  return s;
}

}  // namespace qva
