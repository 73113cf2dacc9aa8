#include <map>
#include <tuple>

#include "qva/verify.h"

namespace qva {

namespace {

State gen_coeff(const ModuleEngine& M, int g, int e, const State& s) {
  if (g == kVacuum) return e == 0 ? s : State{};
  return M.apply_mode(g, -e - 1, s);
}

int gen_lb(const AlgebraSpec& spec, int g, int lw) {
  if (g == kVacuum || !spec.has_nonnegative_modes(g)) return 0;
  return -(lw + 1);
}

Rational signed_binom(long n, long i) {
  Rational c(binom(n, i));
  return i % 2 ? -c : c;
}

}  // namespace

// x0^{-1} delta((x1-x2)/x0) Y(u,x1) Y(v,x2)
//   - x0^{-1} delta((x2-x1)/(-x0)) sum f(-x0) Y(v',x2) Y(u',x1)
//   = x2^{-1} delta((x1-x0)/x2) Y(Y(u,x0)v, x2)
CheckReport check_s_jacobi(const Context& ctx, int u, int v, const Monomial& w, const std::vector<STerm>& row,
                           int window) {
  CheckReport rep;
  rep.name = "check-jacobi";
  const AlgebraSpec& spec = ctx.spec();
  const ModuleEngine& M = ctx.module();
  const FieldEngine& Y = ctx.fields();
  rep.param("u", spec.generators[static_cast<std::size_t>(u)]);
  rep.param("v", spec.generators[static_cast<std::size_t>(v)]);
  rep.param("w", M.to_string(w));
  rep.param("window", window);
  const State ws = State::basis(w);
  const int lw = M.level(w);
  const int W = window;
  const State us = M.generator_state(u), vs = M.generator_state(v);
  const int lu = M.level(us), lv = M.level(vs);

  std::map<std::pair<int, int>, State> hmemo;
  auto H = [&](int p, int q) -> const State& {
    auto it = hmemo.find({p, q});
    if (it == hmemo.end()) it = hmemo.emplace(std::make_pair(p, q), M.apply_mode(u, -p - 1, M.apply_mode(v, -q - 1, ws))).first;
    return it->second;
  };
  std::map<std::tuple<int, int, int, int>, State> gmemo;
  auto G = [&](int bp, int ap, int p, int q) -> const State& {
    auto key = std::make_tuple(bp, ap, p, q);
    auto it = gmemo.find(key);
    if (it == gmemo.end()) it = gmemo.emplace(key, gen_coeff(M, bp, q, gen_coeff(M, ap, p, ws))).first;
    return it->second;
  };
  std::map<int, State> uv;  // u_t v
  auto prod = [&](int t) -> const State& {
    auto it = uv.find(t);
    if (it == uv.end()) it = uv.emplace(t, M.apply_mode(u, t, vs)).first;
    return it->second;
  };

  const int lbv = gen_lb(spec, v, lw);
  long checked = 0;
  for (int r = -W; r <= W; ++r)
    for (int p = -W; p <= W; ++p)
      for (int q = -W; q <= W; ++q) {
        State lhs;
        const int n = -r - 1;
        for (int i = 0; q - i >= lbv && (n < 0 || i <= n); ++i) lhs.add(H(p - n + i, q - i), signed_binom(n, i));
        for (const auto& t : row) {
          const int lba = gen_lb(spec, t.a, lw);
          for (const auto& [e, c] : t.f) {
            const int np = e - r - 1;
            const Rational sign = (e + np) % 2 ? -c : c;
            for (int i = 0; p - i >= lba && (np < 0 || i <= np); ++i)
              lhs.add(G(t.b, t.a, p - i, q - np + i), -sign * signed_binom(np, i));
          }
        }
        State rhs;
        const int jmax = r + 1 + lu + lv;
        for (int j = 0; j <= jmax; ++j) {
          const State& s = prod(j - r - 1);
          if (s.is_zero()) continue;
          const int E = q + p + j + 1;
          rhs.add(Y.mode(s, -E - 1, ws), signed_binom(p + j, j));
        }
        ++checked;
        if (!(lhs == rhs))
          rep.fail("x0^" + std::to_string(r) + " x1^" + std::to_string(p) + " x2^" + std::to_string(q) + ": " +
                   M.to_string(lhs) + " != " + M.to_string(rhs));
      }
  rep.detail("coefficients_checked", checked);
  return rep;
}

// (x0+x2)^l Y(u, x0+x2) Y(v, x2) w = (x0+x2)^l Y(Y(u,x0)v, x2) w
CheckReport check_weak_assoc(const Context& ctx, const State& u, const State& v, const Monomial& w, int l_max,
                             int window, AssocResult* out) {
  CheckReport rep;
  rep.name = "check-assoc";
  const ModuleEngine& M = ctx.module();
  const FieldEngine& Y = ctx.fields();
  rep.param("u", M.to_string(u));
  rep.param("v", M.to_string(v));
  rep.param("w", M.to_string(w));
  rep.param("l_max", l_max);
  rep.param("window", window);
  const State ws = State::basis(w);
  const int lw = M.level(w), lu = M.level(u), lv = M.level(v);
  const bool polynomial = ctx.spec().family == Family::derivation;
  const int lbv = polynomial ? 0 : -(lv + lw);
  const int W = window;

  std::map<std::pair<int, int>, State> fmemo;  // Y(u,x1) Y(v,x2) w
  auto F = [&](int p, int q) -> const State& {
    auto it = fmemo.find({p, q});
    if (it == fmemo.end()) it = fmemo.emplace(std::make_pair(p, q), Y.mode(u, -p - 1, Y.mode(v, -q - 1, ws))).first;
    return it->second;
  };
  std::map<int, State> uv;
  auto prod = [&](int t) -> const State& {
    auto it = uv.find(t);
    if (it == uv.end()) it = uv.emplace(t, Y.mode(u, t, v)).first;
    return it->second;
  };
  std::map<std::pair<int, int>, State> ymemo;  // Y(u_t v, x2) w at x2^e
  auto Yuv = [&](int t, int e) -> const State& {
    auto it = ymemo.find({t, e});
    if (it == ymemo.end()) {
      const State& s = prod(t);
      it = ymemo.emplace(std::make_pair(t, e), s.is_zero() ? State{} : Y.mode(s, -e - 1, ws)).first;
    }
    return it->second;
  };

  std::optional<int> found;
  std::string last_witness;
  for (int l = 0; l <= l_max && !found; ++l) {
    bool ok = true;
    for (int r = -W; r <= W && ok; ++r)
      for (int s = -W; s <= W && ok; ++s) {
        State lhs;
        for (int i = 0; s - i >= lbv; ++i) lhs.add(F(r + i - l, s - i), Rational(binom(r + i, i)));
        State rhs;
        for (int i = 0; i <= l; ++i) {
          const int t = l - i - r - 1;
          if (t >= lu + lv + 1) continue;
          rhs.add(Yuv(t, s - i), Rational(binom(l, i)));
        }
        if (!(lhs == rhs)) {
          ok = false;
          last_witness = "l=" + std::to_string(l) + " at x0^" + std::to_string(r) + " x2^" + std::to_string(s) + ": " +
                         M.to_string(lhs) + " != " + M.to_string(rhs);
        }
      }
    if (ok) found = l;
  }
  if (found) {
    rep.detail("l", *found);
  } else {
    rep.fail("no l <= " + std::to_string(l_max) + " works; " + last_witness);
  }
  if (out) out->l = found;
  return rep;
}

}  // namespace qva
