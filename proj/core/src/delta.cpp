#include "qva/field.h"
#include "qva/linalg.h"

#include <algorithm>
#include <functional>

namespace qva {

namespace {

AlgebraSpec fock_spec(const AlgebraSpec& zf) {
  if (zf.family != Family::zf || !zf.rmatrix) throw std::invalid_argument("Delta_R needs a zf-rmatrix spec");
  AlgebraSpec h = zf;
  h.family = Family::heisenberg;
  return h;
}

class DressedField : public Field {
 public:
  DressedField(const DeltaEngine& d, int a) : d_(d), a_(a) {}
  State coefficient(int e, const State& w) const override { return d_.dressed_coefficient(a_, e, w); }
  int lower_bound(int lw) const override { return -(lw + 1); }
  int level() const override { return 1; }
  std::string describe() const override {
    return d_.spec().generators[static_cast<std::size_t>(a_)] + "_R(x)";
  }

 private:
  const DeltaEngine& d_;
  int a_;
};

}  // namespace

DeltaEngine::DeltaEngine(const AlgebraSpec& zf_spec)
    : spec_(zf_spec), r_(zf_spec.r_matrix()), fock_(std::make_unique<ModuleEngine>(fock_spec(zf_spec))) {}

int DeltaEngine::dressing_sign(int a) const { return spec_.in_dual(a) ? -1 : 1; }

LinComb DeltaEngine::generator_coeff(int sign, int a, int r) const {
  const auto& z = *spec_.rmatrix;
  const bool dual = spec_.in_dual(a);
  const auto& basis = dual ? z.dual : z.U;
  int col = -1;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == a) col = static_cast<int>(i);
  if (col < 0) throw std::invalid_argument("generator outside U and U*");
  QMatrix M;
  if (!dual) M = sign > 0 ? r_.coeff(r) : r_.inverse_coeff(r);
  else M = sign > 0 ? r_.star_coeff(r) : r_.star_inverse_coeff(r);
  LinComb out;
  for (int k = 0; k < M.rows(); ++k)
    if (!qva::is_zero(M(k, col))) lincomb_add(out, basis[static_cast<std::size_t>(k)], M(k, col));
  return out;
}

std::vector<State> DeltaEngine::apply(int sign, const Monomial& w, int order) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find({sign, w});
    if (it != memo_.end() && it->second.order >= order)
      return std::vector<State>(it->second.coeffs.begin(), it->second.coeffs.begin() + order + 1);
  }
  std::vector<State> out(static_cast<std::size_t>(order) + 1);
  if (w.empty()) {
    out[0] = State::vacuum();
  } else {
    const Mode first = w[0];
    const Monomial rest(w.begin() + 1, w.end());
    const int lr = fock_->level(rest);
    const std::vector<State> dr = apply(sign, rest, order);
    // Delta(x) a(m) = sum_{r,i} C(r,i) (-1)^i a^(r)(m+i) x^{r-i} Delta(x)
    const int imax = std::max(0, lr - first.n);
    std::vector<LinComb> gc;
    for (int r = 0; r <= order + imax; ++r) gc.push_back(generator_coeff(sign, first.gen, r));
    for (int t = 0; t <= order; ++t) {
      const State& d = dr[static_cast<std::size_t>(t)];
      if (d.is_zero()) continue;
      for (int i = 0; i <= imax; ++i)
        for (int s = t; s <= order; ++s) {
          const int r = s - t + i;
          if (gc[static_cast<std::size_t>(r)].empty()) continue;
          Rational c(binom(r, i));
          if (i % 2) c = -c;
          for (const auto& [g, gcoef] : gc[static_cast<std::size_t>(r)])
            out[static_cast<std::size_t>(s)].add(fock_->apply_mode(g, first.n + i, d), c * gcoef);
        }
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto& e = memo_[{sign, w}];
  if (e.order < order) e = Entry{order, out};
  return out;
}

std::vector<State> DeltaEngine::apply(int sign, const State& w, int order) const {
  std::vector<State> out(static_cast<std::size_t>(order) + 1);
  for (const auto& [m, c] : w.terms()) {
    auto d = apply(sign, m, order);
    for (int i = 0; i <= order; ++i) out[static_cast<std::size_t>(i)].add(d[static_cast<std::size_t>(i)], c);
  }
  return out;
}

State DeltaEngine::dressed_coefficient(int a, int e, const State& w) const {
  const int sign = dressing_sign(a);
  State out;
  for (const auto& [m, c] : w.terms()) {
    const int J = fock_->level(m) + e + 1;
    if (J < 0) continue;
    auto d = apply(sign, m, J);
    for (int j = 0; j <= J; ++j) out.add(fock_->apply_mode(a, j - e - 1, d[static_cast<std::size_t>(j)]), c);
  }
  return out;
}

FieldPtr DeltaEngine::dressed_field(int a) const { return std::make_shared<DressedField>(*this, a); }

std::vector<State> delta_r_apply(const DeltaEngine& engine, const State& s, int sign, int order) {
  return engine.apply(sign, s, order);
}

// ---------------------------------------------------------- graded dimensions

GrDims gr_dimensions(const ModuleEngine& engine, int L) {
  const AlgebraSpec& spec = engine.spec();
  GrDims g;
  g.actual.assign(static_cast<std::size_t>(L) + 1, 0);
  g.cumulative.assign(static_cast<std::size_t>(L) + 1, 0);
  if (spec.family == Family::derivation) {
    g.reason = "derivation-assoc algebras carry no mode filtration to compare against";
    for (const auto& m : engine.enumerate_basis(L)) g.actual[static_cast<std::size_t>(engine.level(m))]++;
    long acc = 0;
    for (int k = 0; k <= L; ++k) g.cumulative[static_cast<std::size_t>(k)] = acc += g.actual[static_cast<std::size_t>(k)];
    return g;
  }
  std::unique_ptr<DeltaEngine> delta;
  if (spec.family == Family::zf) {
    const RMatrix R = spec.r_matrix();
    if (!(R.coeff(0) == QMatrix::identity(R.dim()))) {
      g.reason = "R(0) is not the identity; freeness over a general A(H,S0) has no basis to compare against";
      g.actual.clear();
      g.cumulative.clear();
      return g;
    }
    delta = std::make_unique<DeltaEngine>(spec);
  }
  auto op = [&](int a, int p, const State& s) {
    return delta ? delta->dressed_coefficient(a, p - 1, s) : engine.apply_mode(a, -p, s);
  };
  const int colors = spec.size();
  g.comparison_available = true;
  for (int k = 0; k <= L; ++k) g.free_expected.push_back(colored_partitions(colors, k));

  // All words a1(-p1)...ar(-pr)|0>, grouped by level.
  std::vector<std::vector<State>> by_level(static_cast<std::size_t>(L) + 1);
  std::function<void(const State&, int)> rec = [&](const State& s, int lev) {
    by_level[static_cast<std::size_t>(lev)].push_back(s);
    for (int p = 1; lev + p <= L; ++p)
      for (int a = 0; a < colors; ++a) {
        State t = op(a, p, s);
        rec(t, lev + p);
      }
  };
  rec(State::vacuum(), 0);

  std::map<Monomial, int> index;
  Echelon ech;
  for (int k = 0; k <= L; ++k) {
    for (const auto& s : by_level[static_cast<std::size_t>(k)]) {
      SparseVec v;
      for (const auto& [m, c] : s.terms()) {
        auto [it, ins] = index.emplace(m, static_cast<int>(index.size()));
        v.emplace_back(it->second, c);
      }
      std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      if (!v.empty()) ech.insert(v);
    }
    g.cumulative[static_cast<std::size_t>(k)] = ech.rank();
    g.actual[static_cast<std::size_t>(k)] = ech.rank() - (k ? g.cumulative[static_cast<std::size_t>(k) - 1] : 0);
  }
  return g;
}

}  // namespace qva
