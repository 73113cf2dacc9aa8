#include "qva/state.h"

#include <algorithm>
#include <sstream>

namespace qva {

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (const auto& md : m) {
    h ^= static_cast<std::size_t>(static_cast<unsigned>(md.gen) * 131u + static_cast<unsigned>(md.n + 1024));
    h *= 1099511628211ull;
  }
  return h;
}

std::size_t ModuleEngine::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = MonomialHash{}(k.m);
  h ^= static_cast<std::size_t>(k.a) * 0x9e3779b97f4a7c15ull + static_cast<std::size_t>(k.n + 4096) * 0x85ebca6bull;
  return h;
}

// -------------------------------------------------------------------- State

State State::basis(const Monomial& m, const Rational& c) {
  State s;
  s.add(m, c);
  return s;
}

Rational State::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void State::add(const Monomial& m, const Rational& c) {
  if (qva::is_zero(c)) return;
  auto [it, ins] = terms_.emplace(m, c);
  if (!ins) {
    it->second += c;
    if (qva::is_zero(it->second)) terms_.erase(it);
  }
}

void State::add(const State& o, const Rational& c) {
  if (qva::is_zero(c)) return;
  for (const auto& [m, v] : o.terms_) add(m, v * c);
}

State& State::operator*=(const Rational& c) {
  if (qva::is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

State operator*(const Rational& c, State s) {
  s *= c;
  return s;
}
State operator+(State a, const State& b) { return a += b; }
State operator-(State a, const State& b) { return a -= b; }

const State& SeriesState::at(int e) const {
  static const State zero;
  if (e >= lo && e <= hi) {
    auto it = coeffs.find(e);
    return it == coeffs.end() ? zero : it->second;
  }
  if (e < lo && lower_certified) return zero;
  throw std::out_of_range("series coefficient outside its window");
}

// ------------------------------------------------------------- ModuleEngine

ModuleEngine::ModuleEngine(AlgebraSpec spec, EngineOptions opt) : spec_(std::move(spec)), opt_(opt) {
  if (spec_.family == Family::derivation) {
    unit_ = spec_.unit();
    if (!unit_) throw SpecError("derivation algebra without a unit");
  }
}

int ModuleEngine::level(const Monomial& m) const {
  int l = 0;
  if (spec_.family == Family::derivation) {
    for (const auto& md : m) l += spec_.grade_of(md.gen);
    return l;
  }
  for (const auto& md : m) l -= md.n;
  return l;
}

int ModuleEngine::level(const State& s) const {
  int l = -1;
  for (const auto& [m, c] : s.terms()) l = std::max(l, level(m));
  return l;
}

bool ModuleEngine::is_normal(const Monomial& m) const {
  if (spec_.family == Family::derivation)
    return m.empty() || (m.size() == 1 && m[0].n == -1 && m[0].gen != *unit_);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].n >= 0) return false;
    if (i && mode_before(m[i], m[i - 1])) return false;
  }
  return true;
}

State ModuleEngine::apply_mode(int gen, int n, const Monomial& m) const {
  if (gen < 0 || gen >= spec_.size()) throw std::out_of_range("generator index out of range");
  if (!is_normal(m)) throw std::invalid_argument("apply_mode expects a normal-form monomial");
  const int L = std::max(1, level(m) + std::max(0, -n));
  return apply_rec(gen, n, m, opt_.depth_factor * L * L + 16);
}

State ModuleEngine::apply_mode(int gen, int n, const State& s) const {
  State r;
  for (const auto& [m, c] : s.terms()) r.add(apply_mode(gen, n, m), c);
  return r;
}

State ModuleEngine::act_monomial_on_vacuum(const std::vector<Mode>& modes) const {
  State s = State::vacuum();
  for (auto it = modes.rbegin(); it != modes.rend(); ++it) {
    s = apply_mode(it->gen, it->n, s);
    if (s.is_zero()) break;
  }
  return s;
}

State ModuleEngine::apply_rec(int a, int n, const State& s, int budget) const {
  State r;
  for (const auto& [m, c] : s.terms()) r.add(apply_rec(a, n, m, budget), c);
  return r;
}

State ModuleEngine::apply_rec(int a, int n, const Monomial& m, int budget) const {
  if (spec_.family == Family::derivation) return apply_derivation(a, n, m);
  if (n >= 0 && !spec_.has_nonnegative_modes(a)) return {};
  // a(n) W[k] lies in W[k - n], and W[k] = 0 for k < 0.
  if (n > level(m)) return {};
  if (m.empty()) return n >= 0 ? State{} : State::basis({Mode{a, n}});
  if (n < 0 && !mode_before(m[0], Mode{a, n})) {
    Monomial r;
    r.reserve(m.size() + 1);
    r.push_back(Mode{a, n});
    r.insert(r.end(), m.begin(), m.end());
    return State::basis(r);
  }
  if (budget <= 0)
    throw StraighteningError("straightening exceeded its depth bound at " + spec_.generators[static_cast<std::size_t>(a)] +
                             "(" + std::to_string(n) + ") on " + to_string(m));
  Key key{a, n, m};
  if (opt_.memoize) {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  State r = spec_.family == Family::zf ? apply_zf(a, n, m, budget - 1) : apply_lie(a, n, m, budget - 1);
  if (opt_.memoize) {
    std::lock_guard<std::mutex> lock(memo_mu_);
    memo_.emplace(std::move(key), r);
  }
  return r;
}

State ModuleEngine::apply_lie(int a, int n, const Monomial& m, int budget) const {
  const Mode first = m[0];
  const Monomial rest(m.begin() + 1, m.end());
  // a(n) b(m) = b(m) a(n) + [a,b](n+m) + central
  State r = apply_rec(first.gen, first.n, apply_rec(a, n, rest, budget), budget);
  for (const auto& [c, coef] : spec_.bracket_of(a, first.gen)) r.add(apply_rec(c, n + first.n, rest, budget), coef);
  const Rational f = spec_.form_of(a, first.gen);
  if (!qva::is_zero(f)) {
    if (spec_.family == Family::heisenberg) {
      if (n + first.n + 1 == 0) r.add(rest, f);
    } else if (n + first.n == 0) {
      r.add(rest, spec_.level * n * f);
    }
  }
  return r;
}

std::vector<STerm> ModuleEngine::zf_row(int b, int a, int order) const {
  std::lock_guard<std::mutex> lock(zf_mu_);
  if (!zf_s_ || zf_order_ < order) {
    const int want = std::max(order, std::max(2 * zf_order_, 4));
    zf_s_ = induced_smap(spec_, want);
    zf_order_ = want;
  }
  return zf_s_->row_or_identity(b, a);
}

State ModuleEngine::apply_zf(int a, int n, const Monomial& m, int budget) const {
  const Mode first = m[0];
  const Monomial rest(m.begin() + 1, m.end());
  const int lr = level(rest);
  State r;
  if (n + first.n + 1 == 0) r.add(rest, spec_.form_of(a, first.gen));
  // a(n) b(m) w = sum_r sum_j c_{r,j} sum_i C(j,i) (-1)^i b^(r)(m+j-i) a^(r)(n+i) w
  const int J = lr - n - first.n;
  if (J < 0) return r;
  for (const auto& t : zf_row(first.gen, a, J)) {
    for (const auto& [j, c] : t.f) {
      if (j < 0 || j > J) continue;
      for (int i = 0; i <= j; ++i) {
        if (n + i > lr) break;
        State inner = apply_rec(t.a, n + i, rest, budget);
        if (inner.is_zero()) continue;
        Rational coef = c * Rational(binom(j, i));
        if (i % 2) coef = -coef;
        r.add(apply_rec(t.b, first.n + j - i, inner, budget), coef);
      }
    }
  }
  return r;
}

State ModuleEngine::apply_derivation(int a, int n, const Monomial& m) const {
  // Y(a, x) b = (e^{x d} a) b, so a(n) = multiplication by d^k a / k!, k = -n-1.
  if (n >= 0) return {};
  const int k = -n - 1;
  LinComb da{{a, Rational(1)}};
  for (int i = 0; i < k && !da.empty(); ++i) {
    LinComb next;
    for (const auto& [g, c] : da)
      for (const auto& [h, e] : spec_.d_of(g)) lincomb_add(next, h, c * e);
    da = std::move(next);
  }
  if (da.empty()) return {};
  const Rational inv_fact = Rational(1) / Rational(factorial(k));
  const int b = m.empty() ? *unit_ : m[0].gen;
  State r;
  for (const auto& [g, c] : da)
    for (const auto& [h, e] : spec_.mult_of(g, b)) {
      Monomial out;
      if (h != *unit_) out.push_back(Mode{h, -1});
      r.add(out, c * e * inv_fact);
    }
  return r;
}

std::vector<Monomial> ModuleEngine::enumerate_basis(int max_level) const {
  std::vector<Monomial> out;
  if (spec_.family == Family::derivation) {
    out.push_back({});
    for (int g = 0; g < spec_.size(); ++g)
      if (g != *unit_ && spec_.grade_of(g) <= max_level) out.push_back({Mode{g, -1}});
  } else {
    // Non-decreasing sequences of modes with n <= -1, built front to back.
    std::vector<Mode> cur;
    std::function<void(int)> rec = [&](int budget) {
      out.push_back(cur);
      for (int n = -budget; n <= -1; ++n)
        for (int g = 0; g < spec_.size(); ++g) {
          const Mode md{g, n};
          if (!cur.empty() && mode_before(md, cur.back())) continue;
          cur.push_back(md);
          rec(budget + n);
          cur.pop_back();
        }
    };
    rec(max_level);
  }
  std::stable_sort(out.begin(), out.end(), [&](const Monomial& x, const Monomial& y) {
    const int lx = level(x), ly = level(y);
    if (lx != ly) return lx < ly;
    return x < y;
  });
  return out;
}

std::vector<int> ModuleEngine::field_generators() const {
  std::vector<int> g;
  for (int i = 0; i < spec_.size(); ++i) {
    if (spec_.family == Family::derivation && (i == *unit_ || spec_.grade_of(i) != 1)) continue;
    g.push_back(i);
  }
  return g;
}

State ModuleEngine::generator_state(int a) const { return State::basis({Mode{a, -1}}); }

std::string ModuleEngine::to_string(const Monomial& m) const {
  if (m.empty()) return "|0>";
  std::string s;
  if (spec_.family == Family::derivation) return spec_.generators[static_cast<std::size_t>(m[0].gen)];
  for (const auto& md : m) s += spec_.generators[static_cast<std::size_t>(md.gen)] + "(" + std::to_string(md.n) + ")";
  return s;
}

std::string ModuleEngine::to_string(const State& st) const {
  if (st.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : st.terms()) {
    if (!first) s += " + ";
    s += qva::to_string(c) + "*" + to_string(m);
    first = false;
  }
  return s;
}

std::size_t ModuleEngine::memo_size() const {
  std::lock_guard<std::mutex> lock(memo_mu_);
  return memo_.size();
}

long colored_partitions(int colors, int k) {
  // Euler product prod_{p >= 1} (1 - q^p)^{-colors}
  std::vector<long> c(static_cast<std::size_t>(k) + 1, 0);
  c[0] = 1;
  for (int p = 1; p <= k; ++p)
    for (int col = 0; col < colors; ++col)
      for (int i = p; i <= k; ++i) c[static_cast<std::size_t>(i)] += c[static_cast<std::size_t>(i - p)];
  return c[static_cast<std::size_t>(k)];
}

}  // namespace qva
