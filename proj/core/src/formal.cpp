#include "qva/formal.h"

#include <algorithm>
#include <functional>
#include <sstream>

namespace qva {

namespace {

template <class Fn>
void for_each_in_box(const Box& b, Fn&& fn) {
  const std::size_t n = b.lo.size();
  for (std::size_t v = 0; v < n; ++v)
    if (b.lo[v] > b.hi[v]) return;
  Exps e = b.lo;
  while (true) {
    fn(e);
    std::size_t v = n;
    while (v > 0) {
      --v;
      if (e[v] < b.hi[v]) {
        ++e[v];
        break;
      }
      e[v] = b.lo[v];
      if (v == 0) return;
    }
    if (n == 0) return;
  }
}

int sign_pow(int s, long n) { return (s < 0 && (n % 2 != 0)) ? -1 : 1; }

void require_same_vars(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a != b) throw std::invalid_argument("series over different variable lists");
}

std::vector<std::string> drop(const std::vector<std::string>& v, std::size_t i) {
  std::vector<std::string> r = v;
  r.erase(r.begin() + static_cast<long>(i));
  return r;
}

Exps drop(const Exps& e, std::size_t i) {
  Exps r = e;
  r.erase(r.begin() + static_cast<long>(i));
  return r;
}

}  // namespace

// ---------------------------------------------------------------- VarOrder

VarOrder::VarOrder(std::vector<std::string> names) : names_(std::move(names)) {
  auto sorted = names_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("variable order repeats a variable");
}

int VarOrder::position(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("variable '" + name + "' not in order");
}

bool VarOrder::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

// --------------------------------------------------------------------- Box

bool Box::contains(const Exps& e) const {
  for (std::size_t v = 0; v < e.size(); ++v)
    if (e[v] < lo[v] || e[v] > hi[v]) return false;
  return true;
}

std::size_t Box::volume() const {
  std::size_t n = 1;
  for (std::size_t v = 0; v < lo.size(); ++v) {
    if (hi[v] < lo[v]) return 0;
    n *= static_cast<std::size_t>(hi[v] - lo[v] + 1);
  }
  return n;
}

Box Box::cube(std::size_t nvars, int lo, int hi) {
  return Box{Exps(nvars, lo), Exps(nvars, hi)};
}

// ------------------------------------------------------------ WindowSeries

WindowSeries::WindowSeries(std::vector<std::string> vars, Box box)
    : vars_(std::move(vars)), box_(std::move(box)), lower_(vars_.size(), false), upper_(vars_.size(), false) {
  if (box_.lo.size() != vars_.size() || box_.hi.size() != vars_.size())
    throw std::invalid_argument("box dimension does not match variables");
}

int WindowSeries::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("variable '" + name + "' not in series");
}

void WindowSeries::certify_all() {
  std::fill(lower_.begin(), lower_.end(), true);
  std::fill(upper_.begin(), upper_.end(), true);
}

bool WindowSeries::known_at(const Exps& e) const {
  if (box_.contains(e)) return true;
  for (std::size_t v = 0; v < e.size(); ++v) {
    if (e[v] < box_.lo[v] && lower_[v]) return true;
    if (e[v] > box_.hi[v] && upper_[v]) return true;
  }
  return false;
}

Rational WindowSeries::coeff(const Exps& e) const {
  if (!known_at(e)) {
    std::ostringstream os;
    os << "coefficient at (";
    for (std::size_t v = 0; v < e.size(); ++v) os << (v ? "," : "") << e[v];
    os << ") lies outside the certified window";
    throw WindowError(os.str());
  }
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void WindowSeries::add(const Exps& e, const Rational& c) {
  if (!box_.contains(e)) throw WindowError("term added outside its window");
  if (qva::is_zero(c)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (qva::is_zero(it->second)) terms_.erase(it);
  }
}

WindowSeries WindowSeries::restricted(const Box& b) const {
  Box nb = box_;
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    nb.lo[v] = std::max(nb.lo[v], b.lo[v]);
    nb.hi[v] = std::min(nb.hi[v], b.hi[v]);
  }
  WindowSeries r(vars_, nb);
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    r.lower_[v] = lower_[v] && nb.lo[v] == box_.lo[v];
    r.upper_[v] = upper_[v] && nb.hi[v] == box_.hi[v];
  }
  for (const auto& [e, c] : terms_)
    if (nb.contains(e)) r.terms_.emplace(e, c);
  return r;
}

WindowSeries& WindowSeries::operator+=(const WindowSeries& o) {
  require_same_vars(vars_, o.vars_);
  // The sum is known where both summands are known: intersect the boxes and
  // keep a certified side only when both sides were certified there.
  Box nb = box_;
  std::vector<bool> lo(vars_.size()), up(vars_.size());
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    lo[v] = lower_[v] && o.lower_[v];
    up[v] = upper_[v] && o.upper_[v];
    nb.lo[v] = lo[v] ? std::min(box_.lo[v], o.box_.lo[v]) : std::max(box_.lo[v], o.box_.lo[v]);
    nb.hi[v] = up[v] ? std::max(box_.hi[v], o.box_.hi[v]) : std::min(box_.hi[v], o.box_.hi[v]);
  }
  WindowSeries r(vars_, nb);
  r.lower_ = lo;
  r.upper_ = up;
  for (const std::map<Exps, Rational>* src : {static_cast<const std::map<Exps, Rational>*>(&terms_), &o.terms_})
    for (const auto& [e, c] : *src)
      if (nb.contains(e)) r.add(e, c);
  // Terms of either summand outside the new box must be certified zeros of
  // the other summand, otherwise the result box would silently drop them.
  for (const WindowSeries* first : {static_cast<const WindowSeries*>(this), &o}) {
    const auto src = std::make_pair(first, nullptr);
    for (const auto& [e, c] : src.first->terms_) {
      if (nb.contains(e)) continue;
      (void)c;
      if (!r.known_at(e)) continue;
      throw WindowError("sum of series with incompatible windows");
    }
  }
  *this = std::move(r);
  return *this;
}

WindowSeries& WindowSeries::operator-=(const WindowSeries& o) {
  WindowSeries neg = o;
  neg *= Rational(-1);
  return *this += neg;
}

WindowSeries& WindowSeries::operator*=(const Rational& c) {
  if (qva::is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

WindowSeries WindowSeries::derivative(std::size_t v) const {
  Box nb = box_;
  nb.lo[v] -= 1;
  nb.hi[v] -= 1;
  WindowSeries r(vars_, nb);
  r.lower_ = lower_;
  r.upper_ = upper_;
  for (const auto& [e, c] : terms_) {
    if (e[v] == 0) continue;
    Exps f = e;
    f[v] -= 1;
    r.add(f, c * e[v]);
  }
  return r;
}

bool WindowSeries::equal_on(const WindowSeries& o, const Box& b) const {
  bool same = true;
  for_each_in_box(b, [&](const Exps& e) {
    if (same && coeff(e) != o.coeff(e)) same = false;
  });
  return same;
}

std::string WindowSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    os << (first ? "" : " + ") << qva::to_string(c);
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] != 0) os << "*" << vars_[v] << "^" << e[v];
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

// -------------------------------------------------------- DirectedRational

DirectedRational::DirectedRational(std::vector<std::string> vars, VarOrder order)
    : vars_(std::move(vars)), order_(std::move(order)) {
  if (order_.size() != vars_.size()) throw std::invalid_argument("order must list every variable once");
  for (const auto& v : vars_)
    if (!order_.contains(v)) throw std::invalid_argument("order misses variable '" + v + "'");
}

DirectedRational DirectedRational::constant(std::vector<std::string> vars, VarOrder order, const Rational& c) {
  DirectedRational r(std::move(vars), std::move(order));
  r.add_numerator_term(Exps(r.vars_.size(), 0), c);
  return r;
}

DirectedRational DirectedRational::monomial(std::vector<std::string> vars, VarOrder order, const Exps& e,
                                            const Rational& c) {
  DirectedRational r(std::move(vars), std::move(order));
  r.add_numerator_term(e, c);
  return r;
}

DirectedRational DirectedRational::difference(std::vector<std::string> vars, VarOrder order,
                                              const std::string& xi, const std::string& xj, int power) {
  DirectedRational r = constant(std::move(vars), std::move(order), 1);
  auto idx = [&](const std::string& n) {
    for (std::size_t k = 0; k < r.vars_.size(); ++k)
      if (r.vars_[k] == n) return static_cast<int>(k);
    throw std::invalid_argument("variable '" + n + "' unknown");
  };
  r.multiply_binomial({idx(xi), idx(xj), 1, -1, power});
  return r;
}

DirectedRational DirectedRational::with_order(VarOrder order) const {
  DirectedRational r = *this;
  r.order_ = std::move(order);
  for (const auto& v : vars_)
    if (!r.order_.contains(v)) throw std::invalid_argument("order misses variable '" + v + "'");
  return r;
}

void DirectedRational::add_numerator_term(const Exps& e, const Rational& c) {
  if (e.size() != vars_.size()) throw std::invalid_argument("exponent arity mismatch");
  if (qva::is_zero(c)) return;
  auto [it, ins] = numerator_.emplace(e, c);
  if (!ins) {
    it->second += c;
    if (qva::is_zero(it->second)) numerator_.erase(it);
  }
}

void DirectedRational::multiply_binomial(const Binomial& b) {
  const int n = static_cast<int>(vars_.size());
  if (b.i == b.j || b.i < 0 || b.j < 0 || b.i >= n || b.j >= n)
    throw std::invalid_argument("denominator not in supported form: binomial needs two distinct variables");
  if ((b.si != 1 && b.si != -1) || (b.sj != 1 && b.sj != -1))
    throw std::invalid_argument("denominator not in supported form: binomial signs must be +1 or -1");
  if (b.power == 0) return;
  binomials_.push_back(b);
}

DirectedRational DirectedRational::operator*(const DirectedRational& o) const {
  if (vars_ != o.vars_) throw std::invalid_argument("product of rationals over different variables");
  if (order_.names() != o.order_.names()) throw std::invalid_argument("product of rationals with different orders");
  DirectedRational r(vars_, order_);
  for (const auto& [e1, c1] : numerator_)
    for (const auto& [e2, c2] : o.numerator_) {
      Exps e(e1.size());
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = e1[v] + e2[v];
      r.add_numerator_term(e, c1 * c2);
    }
  r.binomials_ = binomials_;
  r.binomials_.insert(r.binomials_.end(), o.binomials_.begin(), o.binomials_.end());
  return r;
}

DirectedRational& DirectedRational::operator*=(const Rational& c) {
  if (qva::is_zero(c)) {
    numerator_.clear();
    return *this;
  }
  for (auto& [e, v] : numerator_) v *= c;
  return *this;
}

namespace {

struct Oriented {
  int early, late;
  int s_early, s_late;
  int n;
};

}  // namespace

Rational DirectedRational::coefficient(const Exps& e) const {
  if (e.size() != vars_.size()) throw std::invalid_argument("exponent arity mismatch");
  const std::size_t nv = vars_.size();
  std::vector<int> pos(nv);
  for (std::size_t v = 0; v < nv; ++v) pos[v] = order_.position(vars_[v]);
  std::vector<Oriented> bs;
  for (const auto& b : binomials_) {
    if (pos[b.i] < pos[b.j])
      bs.push_back({b.i, b.j, b.si, b.sj, b.power});
    else
      bs.push_back({b.j, b.i, b.sj, b.si, b.power});
  }
  // Variables from latest to earliest; each binomial's k is fixed when its
  // later variable is processed.
  std::vector<int> by_pos(nv);
  for (std::size_t v = 0; v < nv; ++v) by_pos[pos[v]] = static_cast<int>(v);
  std::vector<std::vector<int>> late_of(nv);
  for (std::size_t t = 0; t < bs.size(); ++t) late_of[bs[t].late].push_back(static_cast<int>(t));

  Rational total = 0;
  for (const auto& [s, c] : numerator_) {
    std::vector<long> rem(nv);
    for (std::size_t v = 0; v < nv; ++v) rem[v] = static_cast<long>(e[v]) - s[v];
    Integer acc_sum = 0;
    std::function<void(int, std::size_t, long, const Integer&)> step;
    // level: index into by_pos from the back; t: which late-binomial of the
    // current variable; budget: what is left to distribute among them.
    step = [&](int level, std::size_t t, long budget, const Integer& acc) {
      if (level < 0) {
        acc_sum += acc;
        return;
      }
      const int v = by_pos[level];
      const auto& list = late_of[v];
      if (t == list.size()) {
        if (budget != 0) return;
        if (level == 0) {
          acc_sum += acc;
          return;
        }
        const int nxt = by_pos[level - 1];
        step(level - 1, 0, rem[nxt], acc);
        return;
      }
      const Oriented& b = bs[list[t]];
      const bool last = t + 1 == list.size();
      long kmin = 0, kmax = budget;
      if (b.n >= 0) kmax = std::min<long>(kmax, b.n);
      if (last) kmin = budget;
      for (long k = kmin; k <= kmax; ++k) {
        if (k < 0) continue;
        Integer f = binom(b.n, k);
        if (f == 0) continue;
        if (sign_pow(b.s_early, b.n) * sign_pow(b.s_early * b.s_late, k) < 0) f = -f;
        rem[b.early] -= (b.n - k);
        step(level, t + 1, budget - k, acc * f);
        rem[b.early] += (b.n - k);
      }
    };
    if (nv == 0) {
      total += c;
      continue;
    }
    const int start = static_cast<int>(nv) - 1;
    step(start, 0, rem[by_pos[start]], Integer(1));
    if (acc_sum != 0) total += c * Rational(acc_sum);
  }
  return total;
}

std::vector<std::optional<int>> DirectedRational::lower_bounds() const {
  const std::size_t nv = vars_.size();
  std::vector<std::optional<int>> r(nv);
  if (numerator_.empty()) {
    for (auto& x : r) x = 0;
    return r;
  }
  for (std::size_t v = 0; v < nv; ++v) {
    int m = numerator_.begin()->first[v];
    for (const auto& [e, c] : numerator_) m = std::min(m, e[v]);
    r[v] = m;
  }
  for (const auto& b : binomials_) {
    const bool i_early = order_.position(vars_[b.i]) < order_.position(vars_[b.j]);
    const int early = i_early ? b.i : b.j;
    if (b.power < 0) r[early].reset();
  }
  return r;
}

std::vector<std::optional<int>> DirectedRational::upper_bounds() const {
  const std::size_t nv = vars_.size();
  std::vector<std::optional<int>> r(nv);
  if (numerator_.empty()) {
    for (auto& x : r) x = 0;
    return r;
  }
  for (std::size_t v = 0; v < nv; ++v) {
    int m = numerator_.begin()->first[v];
    for (const auto& [e, c] : numerator_) m = std::max(m, e[v]);
    r[v] = m;
  }
  for (const auto& b : binomials_) {
    const bool i_early = order_.position(vars_[b.i]) < order_.position(vars_[b.j]);
    const int early = i_early ? b.i : b.j;
    const int late = i_early ? b.j : b.i;
    if (b.power >= 0) {
      if (r[early]) *r[early] += b.power;
      if (r[late]) *r[late] += b.power;
    } else {
      if (r[early]) *r[early] += b.power;
      r[late].reset();
    }
  }
  return r;
}

bool DirectedRational::is_polynomial() const {
  for (const auto& b : binomials_)
    if (b.power < 0) return false;
  return true;
}

// ------------------------------------------------------------ Distribution

void Distribution::add(const WindowSeries& s) {
  require_same_vars(vars_, s.vars());
  series_.push_back(s);
}

void Distribution::add(const DeltaTerm& d) {
  require_same_vars(vars_, d.coeff.vars());
  if (d.a == d.b) throw std::invalid_argument("delta needs two distinct variables");
  if (d.coeff.box().lo[d.a] != 0 || d.coeff.box().hi[d.a] != 0 || !d.coeff.finite_in(d.a))
    throw std::invalid_argument("delta coefficient must not involve the substituted variable");
  for (auto& t : deltas_) {
    if (t.j == d.j && t.a == d.a && t.b == d.b) {
      t.coeff += d.coeff;
      return;
    }
  }
  deltas_.push_back(d);
}

Distribution& Distribution::operator-=(const Distribution& o) {
  require_same_vars(vars_, o.vars_);
  for (auto s : o.series_) {
    s *= Rational(-1);
    add(s);
  }
  for (auto d : o.deltas_) {
    d.coeff *= Rational(-1);
    add(d);
  }
  return *this;
}

Rational Distribution::coeff(const Exps& e) const {
  Rational r = 0;
  for (const auto& s : series_) r += s.coeff(e);
  for (const auto& d : deltas_) {
    bool other_zero = true;
    Exps f = e;
    f[d.a] = 0;
    f[d.b] = e[d.b] + e[d.a] + 1 + d.j;
    (void)other_zero;
    const Integer b = binom(-static_cast<long>(e[d.a]) - 1, d.j);
    if (b == 0) continue;
    r += d.coeff.coeff(f) * Rational(b);
  }
  return r;
}

WindowSeries Distribution::expand(const Box& b) const {
  WindowSeries r(vars_, b);
  for_each_in_box(b, [&](const Exps& e) { r.add(e, coeff(e)); });
  return r;
}

// -------------------------------------------------------------- operations

WindowSeries iota_expand(const DirectedRational& f, const Box& box) {
  WindowSeries r(f.vars(), box);
  for_each_in_box(box, [&](const Exps& e) { r.add(e, f.coefficient(e)); });
  auto lb = f.lower_bounds();
  auto ub = f.upper_bounds();
  for (std::size_t v = 0; v < f.vars().size(); ++v) {
    r.certify_lower(v, lb[v].has_value() && box.lo[v] <= *lb[v]);
    r.certify_upper(v, ub[v].has_value() && box.hi[v] >= *ub[v]);
  }
  return r;
}

WindowSeries iota_expand(const DirectedRational& f, const VarOrder& order, const Box& box) {
  return iota_expand(f.with_order(order), box);
}

DeltaTerm delta_term(const std::vector<std::string>& vars, const std::string& xa, const std::string& xb, int j,
                     const Rational& c) {
  if (j < 0) throw std::invalid_argument("delta derivative order must be nonnegative");
  DeltaTerm d;
  d.j = j;
  WindowSeries coeff(vars, Box::cube(vars.size(), 0, 0));
  d.a = coeff.var_index(xa);
  d.b = coeff.var_index(xb);
  coeff.certify_all();
  coeff.add(Exps(vars.size(), 0), c);
  d.coeff = std::move(coeff);
  return d;
}

WindowSeries delta_series(const std::vector<std::string>& vars, const std::string& xa, const std::string& xb,
                          int j, const Box& box) {
  Distribution d(vars);
  d.add(delta_term(vars, xa, xb, j));
  WindowSeries r = d.expand(box);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (vars[v] == xa || vars[v] == xb) continue;
    r.certify_lower(v, box.lo[v] <= 0);
    r.certify_upper(v, box.hi[v] >= 0);
  }
  return r;
}

WindowSeries mul(const WindowSeries& a, const WindowSeries& b) {
  require_same_vars(a.vars(), b.vars());
  const std::size_t nv = a.vars().size();
  Box nb{Exps(nv), Exps(nv)};
  std::vector<bool> lo(nv), up(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const int al = a.box().lo[v], ah = a.box().hi[v], bl = b.box().lo[v], bh = b.box().hi[v];
    const bool af = a.finite_in(v), bf = b.finite_in(v);
    if (af && bf) {
      nb.lo[v] = al + bl, nb.hi[v] = ah + bh, lo[v] = up[v] = true;
    } else if (af && b.lower_certified(v)) {
      nb.lo[v] = al + bl, nb.hi[v] = bh + al, lo[v] = true;
    } else if (bf && a.lower_certified(v)) {
      nb.lo[v] = al + bl, nb.hi[v] = ah + bl, lo[v] = true;
    } else if (af && b.upper_certified(v)) {
      nb.lo[v] = bl + ah, nb.hi[v] = ah + bh, up[v] = true;
    } else if (bf && a.upper_certified(v)) {
      nb.lo[v] = al + bh, nb.hi[v] = ah + bh, up[v] = true;
    } else if (a.lower_certified(v) && b.lower_certified(v)) {
      nb.lo[v] = al + bl, nb.hi[v] = std::min(ah + bl, bh + al), lo[v] = true;
    } else if (a.upper_certified(v) && b.upper_certified(v)) {
      nb.lo[v] = std::max(al + bh, bl + ah), nb.hi[v] = ah + bh, up[v] = true;
    } else if (af || bf) {
      // a finite factor only shifts the other one
      nb.lo[v] = af ? ah + bl : al + bh;
      nb.hi[v] = af ? al + bh : ah + bl;
      if (nb.lo[v] > nb.hi[v]) throw WindowError("product window empty in variable '" + a.vars()[v] + "'");
    } else {
      throw WindowError("product of series not certified in variable '" + a.vars()[v] + "'");
    }
  }
  WindowSeries r(a.vars(), nb);
  for (std::size_t v = 0; v < nv; ++v) {
    r.certify_lower(v, lo[v]);
    r.certify_upper(v, up[v]);
  }
  Exps e(nv);
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) {
      for (std::size_t v = 0; v < nv; ++v) e[v] = ea[v] + eb[v];
      if (nb.contains(e)) r.add(e, ca * cb);
    }
  return r;
}

Distribution mul(const Distribution& a, const WindowSeries& g) {
  require_same_vars(a.vars(), g.vars());
  Distribution r(a.vars());
  for (const auto& s : a.series()) r.add(mul(s, g));
  const std::size_t nv = a.vars().size();
  for (const auto& d : a.deltas()) {
    if (!g.finite_in(d.a))
      throw WindowError("delta substitution needs a Laurent polynomial in '" + a.vars()[d.a] + "'");
    for (int i = 0; i <= d.j; ++i) {
      // (1/i!) d^i/dx_a^i g, then x_a -> x_b.
      Box hb = g.box();
      hb.lo[d.b] = g.box().lo[d.b] + g.box().lo[d.a] - i;
      hb.hi[d.b] = g.box().hi[d.b] + g.box().hi[d.a] - i;
      hb.lo[d.a] = hb.hi[d.a] = 0;
      WindowSeries h(a.vars(), hb);
      for (std::size_t v = 0; v < nv; ++v) {
        h.certify_lower(v, g.lower_certified(v));
        h.certify_upper(v, g.upper_certified(v));
      }
      h.certify_lower(d.a);
      h.certify_upper(d.a);
      for (const auto& [e, c] : g.terms()) {
        const int p = e[d.a];
        const Integer bc = binom(p, i);
        if (bc == 0) continue;
        Exps f = e;
        f[d.a] = 0;
        f[d.b] = e[d.b] + p - i;
        h.add(f, c * Rational(bc));
      }
      if (h.is_zero() && h.finite_in(d.b)) continue;
      DeltaTerm t;
      t.j = d.j - i;
      t.a = d.a;
      t.b = d.b;
      t.coeff = mul(d.coeff, h);
      r.add(t);
    }
  }
  return r;
}

Distribution mul(const Distribution& a, const Distribution& b) {
  if (!a.deltas().empty() && !b.deltas().empty())
    throw std::invalid_argument("product of two delta distributions is not defined");
  const Distribution& withd = a.deltas().empty() ? b : a;
  const Distribution& plain = a.deltas().empty() ? a : b;
  Distribution r(a.vars());
  for (const auto& s : plain.series()) {
    Distribution part = mul(withd, s);
    for (const auto& x : part.series()) r.add(x);
    for (const auto& x : part.deltas()) r.add(x);
  }
  return r;
}

WindowSeries residue(const WindowSeries& s, const std::string& var) {
  const auto v = static_cast<std::size_t>(s.var_index(var));
  const auto& b = s.box();
  const bool inside = b.lo[v] <= -1 && -1 <= b.hi[v];
  const bool zero = (!inside) && ((b.lo[v] > -1 && s.lower_certified(v)) || (b.hi[v] < -1 && s.upper_certified(v)));
  if (!inside && !zero) throw WindowError("residue in '" + var + "' needs the x^-1 coefficient");
  WindowSeries r(drop(s.vars(), v), Box{drop(b.lo, v), drop(b.hi, v)});
  for (std::size_t w = 0, k = 0; w < s.vars().size(); ++w) {
    if (w == v) continue;
    r.certify_lower(k, s.lower_certified(w));
    r.certify_upper(k, s.upper_certified(w));
    ++k;
  }
  if (inside)
    for (const auto& [e, c] : s.terms())
      if (e[v] == -1) r.add(drop(e, v), c);
  return r;
}

Distribution residue(const Distribution& d, const std::string& var) {
  int v = -1;
  for (std::size_t i = 0; i < d.vars().size(); ++i)
    if (d.vars()[i] == var) v = static_cast<int>(i);
  if (v < 0) throw std::invalid_argument("variable '" + var + "' not in distribution");
  auto remaining = drop(d.vars(), static_cast<std::size_t>(v));
  Distribution r(remaining);
  for (const auto& s : d.series()) r.add(residue(s, var));
  auto reindex = [&](int i) { return i > v ? i - 1 : i; };
  for (const auto& t : d.deltas()) {
    const auto& c = t.coeff;
    if (t.a == v) {
      if (t.j != 0) continue;
      WindowSeries s(remaining, Box{drop(c.box().lo, v), drop(c.box().hi, v)});
      for (std::size_t w = 0, k = 0; w < d.vars().size(); ++w) {
        if (static_cast<int>(w) == v) continue;
        s.certify_lower(k, c.lower_certified(w));
        s.certify_upper(k, c.upper_certified(w));
        ++k;
      }
      for (const auto& [e, x] : c.terms()) s.add(drop(e, v), x);
      r.add(s);
    } else if (t.b == v) {
      // Res_{x_b} x_b^n D_j = C(j - n - 1, j) x_a^{n - j}
      Box nb = c.box();
      nb.lo[t.a] = c.box().lo[t.b] - t.j;
      nb.hi[t.a] = c.box().hi[t.b] - t.j;
      Box rb{drop(nb.lo, v), drop(nb.hi, v)};
      WindowSeries s(remaining, rb);
      for (std::size_t w = 0, k = 0; w < d.vars().size(); ++w) {
        if (static_cast<int>(w) == v) continue;
        const int src = static_cast<int>(w) == t.a ? t.b : static_cast<int>(w);
        s.certify_lower(k, c.lower_certified(src));
        s.certify_upper(k, c.upper_certified(src));
        ++k;
      }
      for (const auto& [e, x] : c.terms()) {
        const int n = e[t.b];
        Exps f = e;
        f[t.a] = n - t.j;
        s.add(drop(f, v), x * Rational(binom(static_cast<long>(t.j) - n - 1, t.j)));
      }
      r.add(s);
    } else {
      DeltaTerm nt;
      nt.j = t.j;
      nt.a = reindex(t.a);
      nt.b = reindex(t.b);
      nt.coeff = residue(c, var);
      r.add(nt);
    }
  }
  return r;
}

DirectedRational substitute_sum(const DirectedRational& f, const std::string& x0, const std::string& x2) {
  if (f.vars().size() != 1 || !f.binomials().empty())
    throw std::invalid_argument("substitute_sum needs a Laurent polynomial in one variable");
  std::vector<std::string> vars{x0, x2};
  DirectedRational r(vars, VarOrder(vars));
  if (f.numerator().empty()) return r;
  const int smin = f.numerator().begin()->first[0];
  // (x0 + x2)^smin times the polynomial sum c_s (x0 + x2)^(s - smin)
  for (const auto& [e, c] : f.numerator()) {
    const int d = e[0] - smin;
    for (int k = 0; k <= d; ++k) r.add_numerator_term({d - k, k}, c * Rational(binom(d, k)));
  }
  r.multiply_binomial({0, 1, 1, 1, smin});
  return r;
}

WindowSeries substitute_sum(const DirectedRational& f, const std::string& x0, const std::string& x2,
                            const Box& box) {
  return iota_expand(substitute_sum(f, x0, x2), box);
}

}  // namespace qva
