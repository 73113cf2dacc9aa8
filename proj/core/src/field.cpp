#include "qva/field.h"

#include <algorithm>

namespace qva {

SeriesState Field::apply(const State& w, int level_w, int lo, int hi, const std::string& var) const {
  SeriesState s;
  s.var = var;
  s.lo = lo;
  s.hi = hi;
  s.lower_certified = lo <= lower_bound(level_w);
  for (int e = lo; e <= hi; ++e) {
    State c = coefficient(e, w);
    if (!c.is_zero()) s.coeffs.emplace(e, std::move(c));
  }
  return s;
}

namespace {

class IdentityField : public Field {
 public:
  State coefficient(int e, const State& w) const override { return e == 0 ? w : State{}; }
  int lower_bound(int) const override { return 0; }
  int level() const override { return 0; }
  std::string describe() const override { return "1"; }
};

class GeneratorField : public Field {
 public:
  GeneratorField(const ModuleEngine& m, int a) : m_(m), a_(a) {}
  State coefficient(int e, const State& w) const override { return m_.apply_mode(a_, -e - 1, w); }
  int lower_bound(int lw) const override { return m_.spec().has_nonnegative_modes(a_) ? -(lw + 1) : 0; }
  int level() const override { return m_.level(Monomial{Mode{a_, -1}}); }
  std::string describe() const override { return m_.spec().generators[static_cast<std::size_t>(a_)] + "(x)"; }

 private:
  const ModuleEngine& m_;
  int a_;
};

class VertexField : public Field {
 public:
  VertexField(const FieldEngine& e, State v) : e_(e), v_(std::move(v)), lv_(std::max(0, e.module().level(v_))) {}
  State coefficient(int e, const State& w) const override { return e_.mode(v_, -e - 1, w); }
  int lower_bound(int lw) const override {
    if (e_.module().spec().family == Family::derivation) return 0;
    return -(lv_ + lw);
  }
  int level() const override { return lv_; }
  std::string describe() const override { return "Y(" + e_.module().to_string(v_) + ",x)"; }

 private:
  const FieldEngine& e_;
  State v_;
  int lv_;
};

class YeField : public Field {
 public:
  YeField(const FieldEngine& e, FieldPtr a, FieldPtr b, int n) : e_(e), a_(std::move(a)), b_(std::move(b)), n_(n) {}
  State coefficient(int e, const State& w) const override {
    return e_.ye_product(*a_, *b_, n_, w, e, e).series.at(e);
  }
  int lower_bound(int lw) const override {
    const int kmax = 2 * (a_->level() + b_->level() + lw) + 4;
    return a_->lower_bound(lw) + b_->lower_bound(lw) - std::max(0, kmax - n_ - 1);
  }
  int level() const override { return std::max(0, a_->level() + b_->level() - n_ - 1); }
  std::string describe() const override {
    return a_->describe() + "_(" + std::to_string(n_) + ")" + b_->describe();
  }

 private:
  const FieldEngine& e_;
  FieldPtr a_, b_;
  int n_;
};

}  // namespace

// ------------------------------------------------------------- FieldEngine

std::size_t FieldEngine::KeyHash::operator()(const Key& k) const noexcept {
  MonomialHash h;
  return h(k.v) * 31 + h(k.w) * 1000003 + static_cast<std::size_t>(k.t + 4096);
}

std::size_t FieldEngine::PairHash::operator()(const std::pair<Monomial, Monomial>& k) const noexcept {
  MonomialHash h;
  return h(k.first) * 31 + h(k.second);
}

FieldEngine::FieldEngine(const ModuleEngine& module, FieldOptions opt) : module_(module), opt_(opt) {}

FieldPtr FieldEngine::identity_field() const { return std::make_shared<IdentityField>(); }
FieldPtr FieldEngine::generator_field(int a) const { return std::make_shared<GeneratorField>(module_, a); }
FieldPtr FieldEngine::vertex_operator(const State& v) const { return std::make_shared<VertexField>(*this, v); }
FieldPtr FieldEngine::ye_product_field(FieldPtr a, FieldPtr b, int n) const {
  return std::make_shared<YeField>(*this, std::move(a), std::move(b), n);
}

State FieldEngine::mode(const State& v, int t, const State& w) const {
  State r;
  for (const auto& [vm, vc] : v.terms())
    for (const auto& [wm, wc] : w.terms()) r.add(mode(vm, t, wm), vc * wc);
  return r;
}

State FieldEngine::mode(const Monomial& v, int t, const Monomial& w) const {
  if (!module_.is_normal(v) || !module_.is_normal(w)) throw std::invalid_argument("mode expects normal-form monomials");
  return mode_rec(v, t, w);
}

State FieldEngine::f_coeff(int a, const Monomial& vp, const Monomial& w, int k, int p, int q) const {
  // Coefficient of x1^p x^q in (x1 - x)^k a(x1) Y(v', x) w.
  const int lw = module_.level(w);
  const int q0 = vp.empty() ? 0 : -(module_.level(vp) + lw);
  State r;
  for (int i = 0; i <= k; ++i) {
    if (q - i < q0) break;
    State inner = mode_rec(vp, -(q - i) - 1, w);
    if (inner.is_zero()) continue;
    Rational c(binom(k, i));
    if (i % 2) c = -c;
    r.add(module_.apply_mode(a, -(p - k + i) - 1, inner), c);
  }
  return r;
}

int FieldEngine::find_k(const Monomial& v, const Monomial& w) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = kcache_.find({v, w});
    if (it != kcache_.end()) return it->second;
  }
  const int a = v[0].gen;
  const Monomial vp(v.begin() + 1, v.end());
  const int lv = module_.level(v), lw = module_.level(w), lvp = module_.level(vp);
  const int p0 = module_.spec().has_nonnegative_modes(a) ? -(lw + 1) : 0;
  const int q0 = vp.empty() ? 0 : -(lvp + lw);
  const int margin = opt_.certify_margin;
  const int qmax = -p0 + margin + lv + lw + 2;
  const int kmax = 2 * (lv + lw) + 4;
  int found = -1;
  for (int k = 0; k <= kmax && found < 0; ++k) {
    bool ok = true;
    for (int p = p0 - margin; p < p0 && ok; ++p)
      for (int q = q0; q <= qmax && ok; ++q)
        if (!f_coeff(a, vp, w, k, p, q).is_zero()) ok = false;
    if (ok) found = k;
  }
  if (found < 0)
    throw NoAdmissibleK("no admissible k up to " + std::to_string(kmax) + " for Y(" + module_.to_string(v) + ") on " +
                        module_.to_string(w));
  std::lock_guard<std::mutex> lock(mu_);
  kcache_.emplace(std::make_pair(v, w), found);
  return found;
}

int FieldEngine::vertex_k(const Monomial& v, const Monomial& w) const {
  if (v.empty()) return 0;
  return find_k(v, w);
}

State FieldEngine::mode_rec(const Monomial& v, int t, const Monomial& w) const {
  if (v.empty()) return t == -1 ? State::basis(w) : State{};
  const int lv = module_.level(v), lw = module_.level(w);
  if (module_.spec().family == Family::derivation) return module_.apply_mode(v[0].gen, t, w);
  // v_t W[k] lies in W[k + lv - t - 1].
  if (t >= lv + lw) return {};
  const int a = v[0].gen, m = v[0].n;
  if (v.size() == 1 && m == -1) return module_.apply_mode(a, t, w);
  Key key{v, t, w};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const Monomial vp(v.begin() + 1, v.end());
  const int k = find_k(v, w);
  // Y(a(m) v', x) = a(x)_m Y(v', x); the x0^{-m-1} coefficient picks j = k - m - 1.
  const int j = k - m - 1;
  const int e = -t - 1;
  const int N = e + j;
  const int p0 = module_.spec().has_nonnegative_modes(a) ? -(lw + 1) : 0;
  const int q0 = vp.empty() ? 0 : -(module_.level(vp) + lw);
  State r;
  for (int p = p0; p <= N - q0; ++p) {
    const Integer c = binom(p, j);
    if (c == 0) continue;
    State f = f_coeff(a, vp, w, k, p, N - p);
    if (!f.is_zero()) r.add(f, Rational(c));
  }
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(std::move(key), r);
  return r;
}

FieldEngine::YeResult FieldEngine::ye_product(const Field& a, const Field& b, int n, const State& probe, int lo,
                                              int hi, int k_min) const {
  const int lw = std::max(0, module_.level(probe));
  const int p0 = a.lower_bound(lw);
  const int q0 = b.lower_bound(lw);
  std::map<int, State> bcache;
  std::map<std::pair<int, int>, State> gcache;
  auto bco = [&](int q) -> const State& {
    auto it = bcache.find(q);
    if (it == bcache.end()) it = bcache.emplace(q, b.coefficient(q, probe)).first;
    return it->second;
  };
  auto G = [&](int p, int q) -> const State& {
    auto key = std::make_pair(p, q);
    auto it = gcache.find(key);
    if (it == gcache.end()) {
      const State& bq = bco(q);
      it = gcache.emplace(key, bq.is_zero() ? State{} : a.coefficient(p, bq)).first;
    }
    return it->second;
  };
  auto F = [&](int k, int p, int q) {
    State r;
    for (int i = 0; i <= k; ++i) {
      if (q - i < q0) break;
      Rational c(binom(k, i));
      if (i % 2) c = -c;
      r.add(G(p - k + i, q - i), c);
    }
    return r;
  };
  const int margin = opt_.certify_margin;
  const int kmax = 2 * (a.level() + b.level() + lw) + 4;
  const int qmax = -p0 + margin + a.level() + b.level() + lw + 2;
  int k = -1;
  for (int kk = std::max(0, k_min); kk <= kmax && k < 0; ++kk) {
    bool ok = true;
    for (int p = p0 - margin; p < p0 && ok; ++p)
      for (int q = q0; q <= qmax && ok; ++q)
        if (!F(kk, p, q).is_zero()) ok = false;
    if (ok) k = kk;
  }
  if (k < 0)
    throw NoAdmissibleK("no admissible k up to " + std::to_string(kmax) + " for " + a.describe() + " and " +
                        b.describe());
  YeResult res;
  res.k = k;
  res.series.lo = lo;
  res.series.hi = hi;
  const int j = k - n - 1;
  res.series.lower_certified = j < 0 || lo <= p0 + q0 - j;
  if (j < 0) return res;
  for (int e = lo; e <= hi; ++e) {
    const int N = e + j;
    State acc;
    for (int p = p0; p <= N - q0; ++p) {
      const Integer c = binom(p, j);
      if (c == 0) continue;
      acc.add(F(k, p, N - p), Rational(c));
    }
    if (!acc.is_zero()) res.series.coeffs.emplace(e, std::move(acc));
  }
  return res;
}

std::size_t FieldEngine::memo_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.size();
}

SeriesState exp_derivation_vertex(const ModuleEngine& module, int a, const State& b, int lo, int hi) {
  const AlgebraSpec& spec = module.spec();
  if (spec.family != Family::derivation) throw std::invalid_argument("exp_derivation_vertex needs a derivation-assoc spec");
  const int unit = *spec.unit();
  SeriesState s;
  s.lo = lo;
  s.hi = hi;
  s.lower_certified = lo <= 0;
  // d^k a / k!, built term by term
  LinComb dk{{a, Rational(1)}};
  for (int k = 0; k <= hi; ++k) {
    if (k > 0) {
      LinComb next;
      for (const auto& [g, c] : dk)
        for (const auto& [h, e] : spec.d_of(g)) lincomb_add(next, h, c / k * e);
      dk = std::move(next);
    }
    if (k < lo) continue;
    State out;
    for (const auto& [bm, bc] : b.terms()) {
      const int bi = bm.empty() ? unit : bm[0].gen;
      for (const auto& [g, c] : dk)
        for (const auto& [h, e] : spec.mult_of(g, bi)) {
          Monomial m;
          if (h != unit) m.push_back(Mode{h, -1});
          out.add(m, c * e * bc);
        }
    }
    if (!out.is_zero()) s.coeffs.emplace(k, std::move(out));
    if (dk.empty()) break;
  }
  return s;
}

}  // namespace qva
