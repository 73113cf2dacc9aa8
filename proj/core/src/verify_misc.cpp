#include <algorithm>
#include <sstream>

#include "qva/verify.h"

namespace qva {

std::string status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

Status combine(Status a, Status b) {
  if (a == Status::fail || b == Status::fail) return Status::fail;
  if (a == Status::inconclusive || b == Status::inconclusive) return Status::inconclusive;
  return Status::pass;
}

void CheckReport::fail(const std::string& witness, std::size_t max_witnesses) {
  status = Status::fail;
  if (witnesses.size() < max_witnesses) witnesses.push_back(witness);
}

void CheckReport::inconclusive(const std::string& why) {
  if (status == Status::pass) status = Status::inconclusive;
  detail("inconclusive", why);
}

Context::Context(AlgebraSpec spec, EngineOptions eo, FieldOptions fo)
    : module_(std::move(spec), eo), fields_(module_, fo) {}

const DeltaEngine& Context::delta() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!delta_) delta_ = std::make_unique<DeltaEngine>(module_.spec());
  return *delta_;
}

bool hs_regime(Family f) { return f == Family::heisenberg || f == Family::zf; }

namespace {

std::string join(const std::vector<long>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

SparseVec to_sparse(const State& s, std::map<Monomial, int>& index) {
  SparseVec v;
  for (const auto& [m, c] : s.terms()) {
    auto [it, ins] = index.emplace(m, static_cast<int>(index.size()));
    v.emplace_back(it->second, c);
  }
  std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return v;
}

// Number of generator factors: the E-filtration length of a monomial.
int e_length(const ModuleEngine& m, const Monomial& mono) {
  if (m.spec().family == Family::derivation) return m.level(mono);
  return static_cast<int>(mono.size());
}

int e_length(const ModuleEngine& m, const State& s) {
  int l = -1;
  for (const auto& [mono, c] : s.terms()) l = std::max(l, e_length(m, mono));
  return l;
}

std::string mode_text(const AlgebraSpec& spec, int a, int n) {
  return spec.generators[static_cast<std::size_t>(a)] + "(" + std::to_string(n) + ")";
}

}  // namespace

// ------------------------------------------------------------------ filtration

CheckReport check_filtration(const Context& ctx, int L) {
  CheckReport rep;
  rep.name = "check-filtration";
  rep.param("level", L);
  const ModuleEngine& M = ctx.module();
  const AlgebraSpec& spec = ctx.spec();
  const bool strong = hs_regime(spec.family);
  long weak_checks = 0, strong_checks = 0, e_checks = 0;
  for (const auto& m : M.enumerate_basis(L)) {
    const int k = M.level(m);
    const int r = e_length(M, m);
    for (int a : ctx.generators())
      for (int n = -(L - k); n <= k + 1; ++n) {
        const State s = M.apply_mode(a, n, m);
        if (s.is_zero()) continue;  // 0 lies in every W[k]
        const int ls = M.level(s);
        const std::string where = mode_text(spec, a, n) + " on " + M.to_string(m);
        ++weak_checks;
        if (ls > k - n)
          rep.fail(where + ": level " + std::to_string(ls) + " exceeds W[" + std::to_string(k - n) + "]");
        if (strong && n >= 0) {
          ++strong_checks;
          if (ls > k - n - 1)
            rep.fail(where + ": level " + std::to_string(ls) + " exceeds W[" + std::to_string(k - n - 1) + "]");
        }
        ++e_checks;
        const int le = e_length(M, s);
        if (le > r + 1)
          rep.fail(where + ": E-length " + std::to_string(le) + " exceeds " + std::to_string(r + 1));
      }
  }
  rep.detail("weak_containments", weak_checks);
  rep.detail("strong_containments", strong ? std::to_string(strong_checks)
                                              : std::string("not applicable to this family"));
  rep.detail("e_filtration_containments", e_checks);
  return rep;
}

// ------------------------------------------------------------------- ker D

CheckReport ker_d_probe(const Context& ctx, int L) {
  CheckReport rep;
  rep.name = "ker-d";
  rep.param("level", L);
  const ModuleEngine& M = ctx.module();
  const auto basis = M.enumerate_basis(L);
  std::map<Monomial, int> index;
  std::vector<SparseVec> cols;
  const Monomial vac;
  for (const auto& b : basis) cols.push_back(to_sparse(ctx.fields().mode(b, -2, vac), index));
  auto ker = exact_kernel(cols);
  const long dim = static_cast<long>(ker.kernel.size());
  rep.detail("dim_space", static_cast<long>(basis.size()));
  rep.detail("dim_ker_D", dim);
  rep.detail("degenerate_by_lemma", dim >= 2 ? "yes" : "no");
  for (const auto& v : ker.kernel) {
    State s;
    for (const auto& [i, c] : v) s.add(basis[static_cast<std::size_t>(i)], c);
    const std::string txt = "ker D contains " + M.to_string(s);
    if (dim >= 2)
      rep.fail(txt);
    else
      rep.detail("kernel", M.to_string(s));
  }
  return rep;
}

// ------------------------------------------------------------------ gr dims

CheckReport gr_dims_check(const Context& ctx, int L) {
  CheckReport rep;
  rep.name = "gr-dims";
  rep.param("level", L);
  const GrDims g = gr_dimensions(ctx.module(), L);
  rep.detail("actual", join(g.actual));
  rep.detail("cumulative", join(g.cumulative));
  if (!g.comparison_available) {
    rep.inconclusive("comparison unavailable: " + g.reason);
    return rep;
  }
  rep.detail("free_expected", join(g.free_expected));
  for (int k = 0; k <= L; ++k)
    if (g.actual[static_cast<std::size_t>(k)] != g.free_expected[static_cast<std::size_t>(k)])
      rep.fail("level " + std::to_string(k) + ": dim gr = " + std::to_string(g.actual[static_cast<std::size_t>(k)]) +
               ", free module has " + std::to_string(g.free_expected[static_cast<std::size_t>(k)]));
  return rep;
}

// ----------------------------------------------------------------- Delta_R

CheckReport check_delta_suite(const Context& ctx, int level, int order, int window) {
  CheckReport rep;
  rep.name = "check-delta";
  rep.param("level", level);
  rep.param("order", order);
  rep.param("window", window);
  if (ctx.spec().family != Family::zf) {
    rep.inconclusive("Delta_R is defined for zf-rmatrix specs only");
    return rep;
  }
  const DeltaEngine& D = ctx.delta();
  const ModuleEngine& F = D.fock();
  const auto probes = F.enumerate_basis(level);
  const auto gens = ctx.generators();
  long checks = 0;

  // Delta(x) 1 = 1
  for (int sign : {1, -1}) {
    auto d = D.apply(sign, Monomial{}, order);
    ++checks;
    bool ok = d[0] == State::vacuum();
    for (int i = 1; i <= order; ++i) ok = ok && d[static_cast<std::size_t>(i)].is_zero();
    if (!ok) rep.fail(std::string("Delta") + (sign > 0 ? "+" : "-") + "(x)|0> != |0>");
  }

  for (const auto& w : probes) {
    const State s = State::basis(w);
    const std::string ws = F.to_string(w);
    std::map<int, std::vector<State>> single;
    for (int sign : {1, -1}) single[sign] = D.apply(sign, s, order);
    // Delta^{sigma}_i applied to Delta^{tau}_j s, for i, j <= order
    std::map<std::pair<int, int>, std::vector<std::vector<State>>> twice;
    for (int sg : {1, -1})
      for (int tau : {1, -1}) {
        auto& t = twice[{sg, tau}];
        for (int j = 0; j <= order; ++j) t.push_back(D.apply(sg, single[tau][static_cast<std::size_t>(j)], order));
      }
    // Delta^+ Delta^- = 1 = Delta^- Delta^+
    for (int sg : {1, -1})
      for (int n = 0; n <= order; ++n) {
        State acc;
        for (int j = 0; j <= n; ++j) acc += twice[{sg, -sg}][static_cast<std::size_t>(j)][static_cast<std::size_t>(n - j)];
        ++checks;
        if (!(acc == (n == 0 ? s : State{})))
          rep.fail(std::string("Delta") + (sg > 0 ? "+" : "-") + " Delta" + (sg > 0 ? "-" : "+") + " != 1 at x^" +
                   std::to_string(n) + " on " + ws);
      }
    // commutativity: Delta^s(x1) Delta^t(x2) = Delta^t(x2) Delta^s(x1)
    for (int sg : {1, -1})
      for (int tau : {1, -1})
        for (int i = 0; i <= order; ++i)
          for (int j = 0; j <= order; ++j) {
            ++checks;
            const State& lhs = twice[{sg, tau}][static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            const State& rhs = twice[{tau, sg}][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!(lhs == rhs))
              rep.fail("commutativity fails at x1^" + std::to_string(i) + " x2^" + std::to_string(j) + " on " + ws);
          }
    // intertwining with generator fields:
    // Delta(x) v(x1) s = Y(Delta(x - x1) v, x1) Delta(x) s
    const int ls = F.level(w);
    for (int sg : {1, -1})
      for (int v : gens)
        for (int e = -window; e <= window; ++e) {
          const State vs = F.apply_mode(v, -e - 1, s);
          const auto lhs = D.apply(sg, vs, order);
          const int rmax = order + ls + e + 1;
          std::vector<LinComb> vr;
          for (int r = 0; r <= std::max(0, rmax); ++r) vr.push_back(D.generator_coeff(sg, v, r));
          for (int i = 0; i <= order; ++i) {
            State rhs;
            for (int r = 0; r <= rmax; ++r)
              for (int c = 0; c <= r; ++c) {
                const int t = i - r + c;
                if (t < 0 || t > order) continue;
                Rational coef(binom(r, c));
                if (c % 2) coef = -coef;
                for (const auto& [g, gc] : vr[static_cast<std::size_t>(r)])
                  rhs.add(F.apply_mode(g, c - e - 1, single[sg][static_cast<std::size_t>(t)]), coef * gc);
              }
            ++checks;
            if (!(lhs[static_cast<std::size_t>(i)] == rhs))
              rep.fail("intertwining fails for " + mode_text(ctx.spec(), v, -e - 1) + " at x^" + std::to_string(i) +
                       " on " + ws);
          }
        }
  }

  // Dressed ZF relations on the Fock space:
  // a_R(x1) b_R(x2) - sum f(x2 - x1) b'_R(x2) a'_R(x1) = <a,b> x2^{-1} delta(x1/x2)
  const int J = 3 * window + 2 * level + 6;
  const SMap S = induced_smap(ctx.spec(), J);
  long pairing_hits = 0;
  for (const auto& w : probes) {
    const State s = State::basis(w);
    const int ls = F.level(w);
    std::map<std::pair<int, int>, State> first;  // a'_R coefficient p' on s
    auto dressed1 = [&](int a, int p) -> const State& {
      auto key = std::make_pair(a, p);
      auto it = first.find(key);
      if (it == first.end()) it = first.emplace(key, D.dressed_coefficient(a, p, s)).first;
      return it->second;
    };
    for (int a : gens)
      for (int b : gens) {
        const auto row = S.row_or_identity(b, a);
        const Rational form = ctx.spec().form_of(a, b);
        for (int p = -window; p <= window; ++p)
          for (int q = -window; q <= window; ++q) {
            State resid = D.dressed_coefficient(a, p, dressed1(b, q));
            for (const auto& t : row)
              for (const auto& [j, c] : t.f) {
                if (j < 0 || j > J) continue;
                for (int i = 0; i <= j; ++i) {
                  const int pp = p - i, qq = q - j + i;
                  if (pp < -(ls + 1)) break;
                  const State& inner = dressed1(t.a, pp);
                  if (inner.is_zero()) continue;
                  Rational coef = c * Rational(binom(j, i));
                  if (i % 2) coef = -coef;
                  resid.add(D.dressed_coefficient(t.b, qq, inner), -coef);
                }
              }
            const bool on_delta = q == -p - 1;
            const State expect = on_delta ? Rational(form) * s : State{};
            ++checks;
            if (!(resid == expect))
              rep.fail("dressed ZF relation fails for " + ctx.spec().generators[static_cast<std::size_t>(a)] + "," +
                       ctx.spec().generators[static_cast<std::size_t>(b)] + " at x1^" + std::to_string(p) + " x2^" +
                       std::to_string(q) + " on " + F.to_string(w));
            else if (on_delta && !is_zero(form))
              ++pairing_hits;
          }
      }
  }
  rep.detail("identities_checked", checks);
  rep.detail("pairing_terms_matched", pairing_hits);
  return rep;
}

}  // namespace qva
