#include <algorithm>
#include <map>
#include <tuple>

#include "qva/verify.h"

namespace qva {

namespace {

// Y(g, x) on s at x^e: g(-e-1) s, or s itself at e = 0 for the vacuum.
State field_coeff(const ModuleEngine& M, int g, int e, const State& s) {
  if (g == kVacuum) return e == 0 ? s : State{};
  return M.apply_mode(g, -e - 1, s);
}

int field_lb(const AlgebraSpec& spec, int g, int lw) {
  if (g == kVacuum || !spec.has_nonnegative_modes(g)) return 0;
  return -(lw + 1);
}

std::string gen_name(const AlgebraSpec& spec, int g) {
  return g == kVacuum ? std::string("1") : spec.generators[static_cast<std::size_t>(g)];
}

struct Unknown {
  int b, a, d;
};

// Linear system for one (a, b): rows are (probe, p, q, monomial).
class SlocalitySystem {
 public:
  SlocalitySystem(const Context& ctx, int a, int b, int f_degree, int level, int window)
      : ctx_(ctx), M_(ctx.module()), a_(a), b_(b), F_(f_degree), W_(window), probes_(ctx.probes(level)) {
    std::vector<int> H{kVacuum};
    for (int g : ctx.generators()) H.push_back(g);
    for (int bp : H)
      for (int ap : H)
        for (int d = -F_; d <= F_; ++d) unknowns_.push_back({bp, ap, d});
  }

  const std::vector<Unknown>& unknowns() const { return unknowns_; }

  // Coefficients of (x1 - x2)^k a(x1) b(x2) w.
  SparseVec lhs(int k) {
    SparseVec out;
    std::map<int, Rational> acc;
    for (std::size_t wi = 0; wi < probes_.size(); ++wi)
      for (int p = -W_; p <= W_; ++p)
        for (int q = -W_; q <= W_; ++q) {
          State s;
          for (int i = 0; i <= k; ++i) {
            Rational c(binom(k, i));
            if (i % 2) c = -c;
            s.add(H(wi, p - k + i, q - i), c);
          }
          accumulate(acc, wi, p, q, s);
        }
    for (auto& [r, c] : acc)
      if (!is_zero(c)) out.emplace_back(r, c);
    return out;
  }

  // Coefficients of (x1 - x2)^k iota_{x2,x1} (x2 - x1)^d b'(x2) a'(x1) w.
  SparseVec column(const Unknown& u, int k) {
    std::map<int, Rational> acc;
    const int n = u.d + k;
    const Rational sign = k % 2 ? -1 : 1;
    for (std::size_t wi = 0; wi < probes_.size(); ++wi) {
      const int lb = field_lb(ctx_.spec(), u.a, M_.level(probes_[wi]));
      for (int p = -W_; p <= W_; ++p)
        for (int q = -W_; q <= W_; ++q) {
          State s;
          for (int i = 0; p - i >= lb && (n < 0 || i <= n); ++i) {
            Rational c(binom(n, i));
            if (i % 2) c = -c;
            s.add(G(wi, u.b, u.a, p - i, q - n + i), c * sign);
          }
          accumulate(acc, wi, p, q, s);
        }
    }
    SparseVec out;
    for (auto& [r, c] : acc)
      if (!is_zero(c)) out.emplace_back(r, c);
    return out;
  }

  std::string describe_row(int r) const { return row_names_[static_cast<std::size_t>(r)]; }

 private:
  void accumulate(std::map<int, Rational>& acc, std::size_t wi, int p, int q, const State& s) {
    for (const auto& [m, c] : s.terms()) {
      auto key = std::make_tuple(static_cast<int>(wi), p, q, m);
      auto [it, ins] = rows_.emplace(key, static_cast<int>(rows_.size()));
      if (ins)
        row_names_.push_back("x1^" + std::to_string(p) + " x2^" + std::to_string(q) + " on " +
                             M_.to_string(probes_[wi]) + " at " + M_.to_string(m));
      acc[it->second] += c;
    }
  }

  const State& H(std::size_t wi, int p, int q) {
    auto key = std::make_tuple(wi, p, q);
    auto it = hmemo_.find(key);
    if (it != hmemo_.end()) return it->second;
    State s = M_.apply_mode(a_, -p - 1, M_.apply_mode(b_, -q - 1, State::basis(probes_[wi])));
    return hmemo_.emplace(key, std::move(s)).first->second;
  }

  const State& G(std::size_t wi, int bp, int ap, int p, int q) {
    auto key = std::make_tuple(wi, bp, ap, p, q);
    auto it = gmemo_.find(key);
    if (it != gmemo_.end()) return it->second;
    State s = field_coeff(M_, bp, q, field_coeff(M_, ap, p, State::basis(probes_[wi])));
    return gmemo_.emplace(key, std::move(s)).first->second;
  }

  const Context& ctx_;
  const ModuleEngine& M_;
  int a_, b_, F_, W_;
  std::vector<Monomial> probes_;
  std::vector<Unknown> unknowns_;
  std::map<std::tuple<int, int, int, Monomial>, int> rows_;
  std::vector<std::string> row_names_;
  std::map<std::tuple<std::size_t, int, int>, State> hmemo_;
  std::map<std::tuple<std::size_t, int, int, int, int>, State> gmemo_;
};

SparseVec subtract(const SparseVec& x, const SparseVec& y) {
  std::map<int, Rational> acc;
  for (const auto& [i, c] : x) acc[i] += c;
  for (const auto& [i, c] : y) acc[i] -= c;
  SparseVec out;
  for (auto& [i, c] : acc)
    if (!is_zero(c)) out.emplace_back(i, c);
  return out;
}

// Residual of a candidate row at k: lhs - sum c * column.
SparseVec residual(SlocalitySystem& sys, int k, const std::vector<Rational>& x) {
  std::map<int, Rational> acc;
  for (const auto& [i, c] : sys.lhs(k)) acc[i] += c;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (is_zero(x[j])) continue;
    for (const auto& [i, c] : sys.column(sys.unknowns()[j], k)) acc[i] -= c * x[j];
  }
  SparseVec out;
  for (auto& [i, c] : acc)
    if (!is_zero(c)) out.emplace_back(i, c);
  return out;
}

std::string row_text(const AlgebraSpec& spec, const std::vector<STerm>& row) {
  std::string s;
  for (const auto& t : row)
    for (const auto& [e, c] : t.f) {
      if (!s.empty()) s += " + ";
      s += "(" + gen_name(spec, t.b) + "," + gen_name(spec, t.a) + "," + to_string(c) + "*x^" + std::to_string(e) + ")";
    }
  return s.empty() ? "0" : s;
}

}  // namespace

SlocalityResult find_slocality(const Context& ctx, int a, int b, int k_max, int f_degree, int level, int window,
                               CheckReport* report) {
  SlocalityResult res;
  SlocalitySystem sys(ctx, a, b, f_degree, level, window);
  const auto& unk = sys.unknowns();
  std::size_t flip = 0;
  for (std::size_t j = 0; j < unk.size(); ++j)
    if (unk[j].b == b && unk[j].a == a && unk[j].d == 0) flip = j;

  for (int k = 0; k <= k_max && !res.k; ++k) {
    std::vector<SparseVec> cols;
    for (const auto& u : unk) cols.push_back(sys.column(u, k));
    // Solve for the deviation from the flip b (x) a.
    const SparseVec rhs = subtract(sys.lhs(k), cols[flip]);
    auto sol = exact_solve(cols, rhs);
    if (!sol) continue;
    (*sol)[flip] += 1;
    res.k = k;
    const KernelResult ker = exact_kernel(cols);
    res.kernel_dim = static_cast<int>(cols.size()) - ker.rank;
    res.unique = res.kernel_dim == 0;
    res.k_independent = residual(sys, k + 1, *sol).empty();
    std::map<std::pair<int, int>, STerm> terms;
    for (std::size_t j = 0; j < unk.size(); ++j) {
      if (is_zero((*sol)[j])) continue;
      auto& t = terms[{unk[j].b, unk[j].a}];
      t.b = unk[j].b;
      t.a = unk[j].a;
      t.f[unk[j].d] = (*sol)[j];
    }
    for (auto& [key, t] : terms) res.row.push_back(t);
  }

  if (report) {
    const AlgebraSpec& spec = ctx.spec();
    report->param("a", gen_name(spec, a));
    report->param("b", gen_name(spec, b));
    report->param("k_max", k_max);
    report->param("f_degree", f_degree);
    report->param("level", level);
    report->param("window", window);
    if (!res.k) {
      report->inconclusive("no S-locality ansatz solves the window for k <= " + std::to_string(k_max) +
                           " and f of degree within " + std::to_string(f_degree));
    } else {
      report->detail("k", *res.k);
      report->detail("row", row_text(spec, res.row));
      report->detail("kernel_dim", res.kernel_dim);
      report->detail("unique", res.unique ? "yes" : "no");
      report->detail("k_independent", res.k_independent ? "yes" : "no");
      if (!res.k_independent) report->fail("the row found at k=" + std::to_string(*res.k) + " fails at k+1");
    }
  }
  return res;
}

std::optional<std::vector<STerm>> closed_form_row(const Context& ctx, int u, int v, int order) {
  try {
    return induced_smap(ctx.spec(), order).row_or_identity(v, u);
  } catch (const NoClosedForm&) {
    return std::nullopt;
  }
}

CheckReport extract_qyb_operator(const Context& ctx, int k_max, int f_degree, int level, int window, SMap* out) {
  CheckReport rep;
  rep.name = "extract-s";
  rep.param("k_max", k_max);
  rep.param("f_degree", f_degree);
  rep.param("level", level);
  rep.param("window", window);
  const AlgebraSpec& spec = ctx.spec();
  SMap s;
  bool all_unique = true;
  for (int a : ctx.generators())
    for (int b : ctx.generators()) {
      const SlocalityResult r = find_slocality(ctx, a, b, k_max, f_degree, level, window);
      const std::string pair = gen_name(spec, b) + " (x) " + gen_name(spec, a);
      if (!r.k) {
        rep.inconclusive("no S-locality row for " + pair);
        continue;
      }
      all_unique = all_unique && r.unique;
      for (const auto& t : r.row)
        for (const auto& [e, c] : t.f) s.add(b, a, t.b, t.a, e, c);
      if (!r.k_independent) rep.fail("row for " + pair + " depends on k");
      rep.detail("S(" + pair + ")", row_text(spec, r.row) + "  [k=" + std::to_string(*r.k) + "]");
    }
  s.add(kVacuum, kVacuum, kVacuum, kVacuum, 0, 1);
  for (int g : ctx.generators()) {
    s.add(kVacuum, g, kVacuum, g, 0, 1);
    s.add(g, kVacuum, g, kVacuum, 0, 1);
  }
  s.normalize();
  rep.detail("unique", all_unique ? "yes" : "no");

  try {
    SMap closed = induced_smap(spec, f_degree);
    bool same = true;
    for (int a : ctx.generators())
      for (int b : ctx.generators()) {
        SMap x, y;
        for (const auto& t : s.row_or_identity(b, a))
          for (const auto& [e, c] : t.f) x.add(b, a, t.b, t.a, e, c);
        for (const auto& t : closed.row_or_identity(b, a))
          for (const auto& [e, c] : t.f)
            if (e <= f_degree) y.add(b, a, t.b, t.a, e, c);
        if (!(x == y)) same = false;
      }
    rep.detail("matches_closed_form", same ? "yes" : "no");
    if (!same && all_unique) rep.fail("extracted S differs from the closed form although the ansatz is unique");
  } catch (const NoClosedForm&) {
    rep.detail("matches_closed_form", "no closed form");
  }

  std::vector<int> basis{kVacuum};
  for (int g : ctx.generators()) basis.push_back(g);
  const int N = 4;
  const CheckReport q = check_qyb(spec, s, basis, N);
  const CheckReport u = check_unitarity(spec, s, basis, N);
  rep.detail("qyb", status_name(q.status));
  rep.detail("unitarity", status_name(u.status));
  for (const auto* sub : {&q, &u}) {
    if (sub->status == Status::fail)
      for (const auto& w : sub->witnesses) rep.fail(sub->name + ": " + w);
    else if (sub->status == Status::inconclusive)
      rep.inconclusive(sub->name + " inconclusive");
  }
  if (out) *out = std::move(s);
  return rep;
}

}  // namespace qva
