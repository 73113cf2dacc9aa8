#include <algorithm>
#include <map>

#include "qva/formal.h"
#include "qva/verify.h"

namespace qva {

namespace {

bool in_ideal(const AlgebraSpec& spec, int a) {
  const auto& k = spec.semidirect->ideal;
  return std::find(k.begin(), k.end(), a) != k.end();
}

// Coefficients of a(x1) b(x2) w, indexed by (p, q), computed on demand.
class Products {
 public:
  Products(const ModuleEngine& m, int a, int b, const Monomial& w) : m_(m), a_(a), b_(b), w_(State::basis(w)) {}

  const State& ab(int p, int q) { return get(ab_, a_, p, b_, q); }
  const State& ba(int p, int q) { return get(ba_, b_, q, a_, p); }
  State comm(int p, int q) { return ab(p, q) - ba(p, q); }

 private:
  const State& get(std::map<std::pair<int, int>, State>& memo, int outer, int po, int inner, int pi) {
    auto key = std::make_pair(po, pi);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    State s = m_.apply_mode(outer, -po - 1, m_.apply_mode(inner, -pi - 1, w_));
    return memo.emplace(key, std::move(s)).first->second;
  }
  const ModuleEngine& m_;
  int a_, b_;
  State w_;
  std::map<std::pair<int, int>, State> ab_, ba_;
};

// x^{-1} delta and its first derivative as distributions in (x1, x2).
struct Deltas {
  Distribution d0, d1;
  Deltas() : d0({"x1", "x2"}), d1({"x1", "x2"}) {
    d0.add(delta_term({"x1", "x2"}, "x1", "x2", 0));
    d1.add(delta_term({"x1", "x2"}, "x1", "x2", 1));
  }
};

// Direct product in the differential algebra: (d^p a / p!) * s.
State derivation_left(const AlgebraSpec& spec, int unit, int a, int p, const State& s) {
  LinComb da{{a, Rational(1)}};
  Rational fact = 1;
  for (int i = 1; i <= p; ++i) {
    LinComb next;
    for (const auto& [g, c] : da)
      for (const auto& [h, e] : spec.d_of(g)) lincomb_add(next, h, c * e);
    da = std::move(next);
    fact *= i;
  }
  State r;
  for (const auto& [m, c] : s.terms()) {
    const int b = m.empty() ? unit : m[0].gen;
    for (const auto& [g, cg] : da)
      for (const auto& [h, e] : spec.mult_of(g, b)) {
        Monomial out;
        if (h != unit) out.push_back(Mode{h, -1});
        r.add(out, c * cg * e / fact);
      }
  }
  return r;
}

std::string at(const AlgebraSpec& spec, int a, int b, int p, int q, const std::string& w) {
  return spec.generators[static_cast<std::size_t>(a)] + "(x1)" + spec.generators[static_cast<std::size_t>(b)] +
         "(x2) at x1^" + std::to_string(p) + " x2^" + std::to_string(q) + " on " + w;
}

}  // namespace

CheckReport check_structure_relations(const Context& ctx, int level, int window) {
  CheckReport rep;
  rep.name = "check-relations";
  rep.param("level", level);
  rep.param("window", window);
  const AlgebraSpec& spec = ctx.spec();
  const ModuleEngine& M = ctx.module();
  const Deltas dl;
  const int W = window;
  long checked = 0;

  for (const auto& w : ctx.probes(level)) {
    const int lw = M.level(w);
    const std::string ws = M.to_string(w);
    for (int a : ctx.generators())
      for (int b : ctx.generators()) {
        Products P(M, a, b, w);
        auto field_coeff = [&](int c, int e) { return M.apply_mode(c, -e - 1, State::basis(w)); };
        for (int p = -W; p <= W; ++p)
          for (int q = -W; q <= W; ++q) {
            State lhs, rhs;
            switch (spec.family) {
              case Family::heisenberg: {
                lhs = P.comm(p, q);
                rhs = (spec.form_of(a, b) * dl.d0.coeff({p, q})) * State::basis(w);
                break;
              }
              case Family::affine: {
                lhs = P.comm(p, q);
                // [c(x2) w] x2^{-1} delta(x1/x2): only x2^s with s = p + q + 1 meets the delta
                for (int s = -(lw + 1); s <= 2 * W + 2; ++s) {
                  const Rational dc = dl.d0.coeff({p, q - s});
                  if (is_zero(dc)) continue;
                  for (const auto& [c, lam] : spec.bracket_of(a, b)) rhs.add(field_coeff(c, s), lam * dc);
                }
                rhs.add(State::basis(w), spec.level * spec.form_of(a, b) * dl.d1.coeff({p, q}));
                break;
              }
              case Family::half_current: {
                // (x2 - x1)[a(x1), b(x2)] = [a,b](x2) x1^0 - [a,b](x1) x2^0
                lhs = P.comm(p, q - 1) - P.comm(p - 1, q);
                for (const auto& [c, lam] : spec.bracket_of(a, b)) {
                  if (p == 0) rhs.add(field_coeff(c, q), lam);
                  if (q == 0) rhs.add(field_coeff(c, p), -lam);
                }
                break;
              }
              case Family::semidirect: {
                const bool ka = in_ideal(spec, a), kb = in_ideal(spec, b);
                if (ka && kb) {
                  lhs = P.comm(p, q);
                  for (int s = -(lw + 1); s <= 2 * W + 2; ++s) {
                    const Rational dc = dl.d0.coeff({p, q - s});
                    if (is_zero(dc)) continue;
                    for (const auto& [c, lam] : spec.bracket_of(a, b)) rhs.add(field_coeff(c, s), lam * dc);
                  }
                  rhs.add(State::basis(w), spec.level * spec.form_of(a, b) * dl.d1.coeff({p, q}));
                } else if (!ka && !kb) {
                  lhs = P.comm(p, q - 1) - P.comm(p - 1, q);
                  for (const auto& [c, lam] : spec.bracket_of(a, b)) {
                    if (p == 0) rhs.add(field_coeff(c, q), lam);
                    if (q == 0) rhs.add(field_coeff(c, p), -lam);
                  }
                } else {
                  // (x1 - x2)[a(x1), b(x2)] = [a,b](x1) x2^0 (a full) or -[a,b](x2) x1^0 (b full)
                  lhs = P.comm(p - 1, q) - P.comm(p, q - 1);
                  for (const auto& [c, lam] : spec.bracket_of(a, b)) {
                    if (ka && q == 0) rhs.add(field_coeff(c, p), lam);
                    if (kb && p == 0) rhs.add(field_coeff(c, q), -lam);
                  }
                }
                break;
              }
              case Family::zf: {
                // a(x1) b(x2) - sum f(x2 - x1) b'(x2) a'(x1) = <a,b> x2^{-1} delta(x1/x2)
                lhs = P.ab(p, q);
                const int J = p + q + lw + 2;
                if (J >= 0)
                  for (const auto& t : M.zf_row(b, a, J))
                    for (const auto& [j, c] : t.f) {
                      if (j < 0 || j > J) continue;
                      for (int i = 0; i <= j; ++i) {
                        const int pp = p - i, qq = q - j + i;
                        if (pp < -(lw + 1)) break;
                        const State inner = M.apply_mode(t.a, -pp - 1, State::basis(w));
                        if (inner.is_zero()) continue;
                        Rational coef = c * Rational(binom(j, i));
                        if (i % 2) coef = -coef;
                        lhs.add(M.apply_mode(t.b, -qq - 1, inner), -coef);
                      }
                    }
                rhs = (spec.form_of(a, b) * dl.d0.coeff({p, q})) * State::basis(w);
                break;
              }
              case Family::derivation: {
                // fields commute and a(-p-1) is multiplication by d^p a / p!
                if (p < 0 || q < 0) continue;
                const int unit = *spec.unit();
                const State direct = derivation_left(spec, unit, a, p, derivation_left(spec, unit, b, q, State::basis(w)));
                ++checked;
                if (!(P.ab(p, q) == direct))
                  rep.fail(at(spec, a, b, p, q, ws) + ": product " + M.to_string(P.ab(p, q)) + " != " +
                           M.to_string(direct));
                lhs = P.comm(p, q);
                break;
              }
            }
            ++checked;
            if (!(lhs == rhs))
              rep.fail(at(spec, a, b, p, q, ws) + ": " + M.to_string(lhs) + " != " + M.to_string(rhs));
          }
      }
  }
  rep.detail("coefficients_checked", checked);
  return rep;
}

}  // namespace qva
