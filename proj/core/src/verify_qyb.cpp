#include <array>
#include <map>

#include "qva/verify.h"

namespace qva {

namespace {

using Bi = std::map<std::pair<int, int>, Rational>;  // (x exponent, z exponent)
using Key3 = std::array<int, 3>;
using Vec3 = std::map<Key3, Bi>;

enum class Arg { x, z, x_plus_z };

// Bounds that keep every coefficient with x, z <= N exact: each factor
// contributes total degree >= -F, z-part >= -F and lowers x by at most N + 2F.
struct Budget {
  int N, F;
  bool keep(int x, int z, int remaining) const {
    return x + z <= 2 * N + remaining * F && z <= N + remaining * F && x <= N + remaining * (N + 2 * F);
  }
  int max_exponent() const { return 2 * N + 3 * F; }
};

int most_negative(const SMap& s) {
  int F = 0;
  for (const auto& [k, row] : s.rows)
    for (const auto& t : row)
      for (const auto& [e, c] : t.f) F = std::max(F, -e);
  return F;
}

std::string name(const AlgebraSpec& spec, int g) {
  return g == kVacuum ? std::string("1") : spec.generators[static_cast<std::size_t>(g)];
}

// f(arg) as bivariate terms within the budget.
Bi expand(const std::map<int, Rational>& f, Arg arg, const Budget& bd, int remaining) {
  Bi out;
  for (const auto& [e, c] : f) {
    if (e > bd.max_exponent()) continue;
    switch (arg) {
      case Arg::x: out[{e, 0}] += c; break;
      case Arg::z: out[{0, e}] += c; break;
      case Arg::x_plus_z:
        for (int i = 0; (e < 0 || i <= e) && i <= bd.N + remaining * bd.F + bd.F; ++i) {
          Rational b(binom(e, i));
          out[{e - i, i}] += c * b;
        }
        break;
    }
  }
  return out;
}

Vec3 apply(const SMap& s, const Vec3& v, int i, int j, Arg arg, const Budget& bd, int remaining) {
  Vec3 out;
  std::map<const std::vector<STerm>*, std::vector<Bi>> cache;
  for (const auto& [key, series] : v) {
    const auto row = s.row_or_identity(key[static_cast<std::size_t>(i)], key[static_cast<std::size_t>(j)]);
    for (const auto& t : row) {
      const Bi f = expand(t.f, arg, bd, remaining);
      Key3 nk = key;
      nk[static_cast<std::size_t>(i)] = t.b;
      nk[static_cast<std::size_t>(j)] = t.a;
      Bi& dst = out[nk];
      for (const auto& [e1, c1] : series)
        for (const auto& [e2, c2] : f) {
          const int x = e1.first + e2.first, z = e1.second + e2.second;
          if (!bd.keep(x, z, remaining)) continue;
          dst[{x, z}] += c1 * c2;
        }
    }
  }
  return out;
}

bool exact_enough(const SMap& s, int need, CheckReport& rep) {
  if (s.exact_to && *s.exact_to < need) {
    rep.inconclusive("S is exact only to order " + std::to_string(*s.exact_to) + ", the check needs " +
                     std::to_string(need));
    return false;
  }
  return true;
}

}  // namespace

// S12(x) S13(x+z) S23(z) = S23(z) S13(x+z) S12(x), S13 expanded in powers of z.
CheckReport check_qyb(const AlgebraSpec& spec, const SMap& s, const std::vector<int>& basis, int order) {
  CheckReport rep;
  rep.name = "check-qyb";
  rep.param("order", order);
  const Budget bd{order, most_negative(s)};
  if (!exact_enough(s, bd.max_exponent(), rep)) return rep;
  long checked = 0;
  for (int h1 : basis)
    for (int h2 : basis)
      for (int h3 : basis) {
        Vec3 v;
        v[{h1, h2, h3}][{0, 0}] = 1;
        const Vec3 lhs = apply(s, apply(s, apply(s, v, 1, 2, Arg::z, bd, 2), 0, 2, Arg::x_plus_z, bd, 1), 0, 1, Arg::x, bd, 0);
        const Vec3 rhs = apply(s, apply(s, apply(s, v, 0, 1, Arg::x, bd, 2), 0, 2, Arg::x_plus_z, bd, 1), 1, 2, Arg::z, bd, 0);
        std::map<std::pair<Key3, std::pair<int, int>>, Rational> diff;
        for (const auto& [k, ser] : lhs)
          for (const auto& [e, c] : ser)
            if (e.first <= order && e.second <= order) diff[{k, e}] += c;
        for (const auto& [k, ser] : rhs)
          for (const auto& [e, c] : ser)
            if (e.first <= order && e.second <= order) diff[{k, e}] -= c;
        ++checked;
        for (const auto& [k, c] : diff)
          if (!is_zero(c)) {
            rep.fail("on " + name(spec, h1) + "(x)" + name(spec, h2) + "(x)" + name(spec, h3) + " component " +
                     name(spec, k.first[0]) + "(x)" + name(spec, k.first[1]) + "(x)" + name(spec, k.first[2]) +
                     " at x^" + std::to_string(k.second.first) + " z^" + std::to_string(k.second.second) +
                     ": difference " + to_string(c));
            break;
          }
      }
  rep.detail("triples_checked", checked);
  return rep;
}

// S21(-x) S(x) = 1 with S21(x) = sigma S(x) sigma.
CheckReport check_unitarity(const AlgebraSpec& spec, const SMap& s, const std::vector<int>& basis, int order) {
  CheckReport rep;
  rep.name = "check-unitarity";
  rep.param("order", order);
  const int F = most_negative(s);
  const int cap = order + F;
  if (!exact_enough(s, cap, rep)) return rep;
  long checked = 0;
  for (int b : basis)
    for (int a : basis) {
      std::map<std::pair<int, int>, std::map<int, Rational>> out;  // (b'', a'') -> series in x
      for (const auto& t : s.row_or_identity(b, a))
        for (const auto& u : s.row_or_identity(t.a, t.b))
          for (const auto& [e1, c1] : t.f)
            for (const auto& [e2, c2] : u.f) {
              if (e1 > cap || e2 > cap || e1 + e2 > order) continue;
              const Rational sign = e2 % 2 ? -1 : 1;
              out[{u.a, u.b}][e1 + e2] += c1 * c2 * sign;
            }
      out[{b, a}][0] -= 1;
      ++checked;
      for (const auto& [k, ser] : out)
        for (const auto& [e, c] : ser)
          if (!is_zero(c)) {
            rep.fail("on " + name(spec, b) + "(x)" + name(spec, a) + " component " + name(spec, k.first) + "(x)" +
                     name(spec, k.second) + " at x^" + std::to_string(e) + ": " + to_string(c));
            goto next;
          }
    next:;
    }
  rep.detail("pairs_checked", checked);
  return rep;
}

}  // namespace qva
