// Acceptance run: one PASS/FAIL line per criterion. Exits 0 when the set of
// failing criteria is exactly the set given with --expect-fail (default empty),
// so a known failure stays visible and an unexpected pass is also an error.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "qva/cli.h"
#include "qva/verify.h"

using namespace qva;

namespace {

std::string fixture(const std::string& name) { return std::string(QVA_FIXTURE_DIR) + "/" + name + ".alg"; }

const std::vector<std::string> kFixtures{"sl2-affine",   "sl2-halfcurrent", "heisenberg-rank1", "heisenberg-rank2",
                                         "zf-nilpotent", "semidirect-borel", "eps-derivation",  "cx-derivation"};

struct Outcome {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& why) {
    if (!cond && ok) note = why;
    ok = ok && cond;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SMap as_smap(int b, int a, const std::vector<STerm>& row, SMap m = {}) {
  for (const auto& t : row)
    for (const auto& [e, c] : t.f) m.add(b, a, t.b, t.a, e, c);
  return m;
}

long count_multisets(int colors, int k) {
  std::function<long(int, int, int)> rec = [&](int left, int part, int color) -> long {
    if (left == 0) return 1;
    if (part > left) return 0;
    return rec(left - part, part, color) + (color + 1 < colors ? rec(left, part, color + 1) : rec(left, part + 1, 0));
  };
  return rec(k, 1, 0);
}

Outcome heisenberg_relations() {
  Outcome o;
  for (const char* f : {"heisenberg-rank1", "heisenberg-rank2"}) {
    const auto r = check_structure_relations(Context(load_spec(fixture(f))), 3, 4);
    o.require(r.status == Status::pass, std::string(f) + ": " + status_name(r.status));
  }
  return o;
}

Outcome half_current_operator() {
  Outcome o;
  Context ctx(load_spec(fixture("sl2-halfcurrent")));
  const SMap closed = induced_smap(ctx.spec());
  SMap found, want;
  for (int a : ctx.generators())
    for (int b : ctx.generators()) {
      const auto r = find_slocality(ctx, a, b, 4, 2, 1, 3);
      o.require(r.k.has_value() && r.unique, "no unique S row for a pair");
      found = as_smap(b, a, r.row, found);
      want = as_smap(b, a, closed.row_or_identity(b, a), want);
    }
  found.normalize();
  want.normalize();
  o.require(found == want, "recovered S differs from the closed form");
  std::vector<int> basis{kVacuum};
  for (int g : ctx.generators()) basis.push_back(g);
  o.require(check_qyb(ctx.spec(), found, basis, 8).status == Status::pass, "QYB fails");
  o.require(check_unitarity(ctx.spec(), found, basis, 8).status == Status::pass, "unitarity fails");
  return o;
}

Outcome affine_jacobi() {
  Outcome o;
  Context ctx(load_spec(fixture("sl2-affine")));
  int n = 0;
  for (int u : ctx.generators())
    for (int v : ctx.generators()) {
      STerm flip;
      flip.b = v;
      flip.a = u;
      flip.f[0] = 1;
      for (const auto& w : ctx.probes(2)) {
        const auto r = check_s_jacobi(ctx, u, v, w, {flip}, 4);
        o.require(r.status == Status::pass, "jacobi fails on " + ctx.module().to_string(w));
        ++n;
      }
    }
  o.note = o.ok ? std::to_string(n) + " triples" : o.note;
  return o;
}

Outcome weak_associativity() {
  Outcome o;
  std::ostringstream ls;
  for (const auto& f : kFixtures) {
    const auto t0 = std::chrono::steady_clock::now();
    Context ctx(load_spec(fixture(f)));
    int worst = 0;
    for (int u : ctx.generators())
      for (int v : ctx.generators())
        for (const auto& w : ctx.probes(2)) {
          AssocResult res;
          const auto r = check_weak_assoc(ctx, ctx.module().generator_state(u), ctx.module().generator_state(v), w, 4,
                                          4, &res);
          o.require(r.status == Status::pass && res.l && *res.l <= 4, f + ": no l <= 4");
          if (res.l) worst = std::max(worst, *res.l);
        }
    const double s = seconds_since(t0);
    o.require(s < 300, f + " took longer than 5 min");
    ls << (ls.tellp() ? " " : "") << f << "=" << worst;
  }
  if (o.ok) o.note = "max l: " + ls.str();
  return o;
}

std::vector<std::pair<std::string, Rational>> described(const Context& ctx,
                                                        const std::vector<std::pair<ProbeColumn, Rational>>& combo) {
  std::vector<std::pair<std::string, Rational>> out;
  for (const auto& [c, k] : combo) out.emplace_back(describe_column(ctx, c), k);
  std::sort(out.begin(), out.end());
  return out;
}

Outcome degeneracy_witnesses() {
  Outcome o;
  const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Rational>>>> cases{
      {"eps-derivation", {{"1 (x) eps (x) 1", Rational(-1)}, {"eps (x) 1 (x) 1", Rational(1)}}},
      {"cx-derivation",
       {{"1 (x) 1 (x) 1", Rational(-1)}, {"1 (x) t (x) (x1-x2)^-1", Rational(-1)}, {"t (x) 1 (x) (x1-x2)^-1", Rational(1)}}}};
  for (const auto& [f, want] : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    Context ctx(load_spec(fixture(f)));
    ProbeResult res;
    const auto r = nondegeneracy_probe(ctx, 2, 2, 3, 2, &res);
    bool found = false;
    for (const auto& combo : res.structural) found = found || described(ctx, combo) == want;
    o.require(r.status == Status::fail && found, f + ": witness not found");
    o.require(seconds_since(t0) < 10, f + " took longer than 10 s");
  }
  return o;
}

Outcome sl2_nondegeneracy() {
  Outcome o;
  ProbeResult res;
  const auto r = nondegeneracy_probe(Context(load_spec(fixture("sl2-affine"))), 2, 2, 3, 2, &res);
  o.require(r.status == Status::pass && res.full_rank_certified, "rank " + std::to_string(res.rank) + " of " +
                                                                     std::to_string(res.columns));
  if (o.ok) o.note = "rank " + std::to_string(res.rank) + " = columns";
  return o;
}

Outcome pbw_dimensions() {
  Outcome o;
  for (const auto& [f, colors] : std::vector<std::pair<std::string, int>>{{"zf-nilpotent", 4}, {"heisenberg-rank1", 2},
                                                                          {"heisenberg-rank2", 4}}) {
    ModuleEngine M(load_spec(fixture(f)));
    const GrDims g = gr_dimensions(M, 4);
    o.require(g.comparison_available, f + ": no comparison");
    for (int k = 0; k <= 4 && g.comparison_available; ++k)
      o.require(g.actual[static_cast<std::size_t>(k)] == count_multisets(colors, k), f + ": level " + std::to_string(k));
  }
  return o;
}

Outcome delta_suite() {
  Outcome o;
  const auto r = check_delta_suite(Context(load_spec(fixture("zf-nilpotent"))), 2, 4, 3);
  o.require(r.status == Status::pass, "delta suite " + status_name(r.status));
  for (const auto& [k, v] : r.details)
    if (k == "pairing_terms_matched") o.require(std::stol(v) > 0, "no pairing terms");
  return o;
}

Outcome vacuum_vanishing() {
  Outcome o;
  std::mt19937 rng(4242);
  std::ostringstream bad;
  for (const auto& f : kFixtures) {
    const AlgebraSpec spec = load_spec(fixture(f));
    ModuleEngine M(spec);
    const auto gens = M.field_generators();
    int failures = 0;
    std::string example;
    for (int done = 0; done < 1000;) {
      const int r = 1 + static_cast<int>(rng() % 4);
      std::vector<Mode> modes;
      int sum = 0;
      for (int i = 0; i < r; ++i) {
        modes.push_back(Mode{gens[rng() % gens.size()], static_cast<int>(rng() % 9) - 4});
        sum += modes.back().n;
      }
      if (sum < 0) continue;
      ++done;
      const State s = M.act_monomial_on_vacuum(modes);
      if (!s.is_zero()) {
        if (!failures++) {
          for (const auto& md : modes)
            example += spec.generators[static_cast<std::size_t>(md.gen)] + "(" + std::to_string(md.n) + ")";
          example += "|0> = " + M.to_string(s);
        }
      }
    }
    if (failures) bad << (bad.tellp() ? "; " : "") << f << ": " << failures << "/1000, e.g. " << example;
  }
  o.require(bad.str().empty(), bad.str());
  return o;
}

Outcome filtration() {
  Outcome o;
  for (const auto& f : kFixtures) {
    const auto r = check_filtration(Context(load_spec(fixture(f))), 4);
    o.require(r.status == Status::pass, f + ": " + status_name(r.status));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--expect-fail" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) expected.insert(std::stoi(item));
    } else {
      std::cerr << "usage: qva_acceptance [--expect-fail N[,N...]]\n";
      return 3;
    }
  }
  struct Criterion {
    int id;
    const char* title;
    double limit;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "Heisenberg relations, level <= 3, window 4", 10, heisenberg_relations},
      {2, "half-current S recovered; QYB and unitarity to order 8", 60, half_current_operator},
      {3, "affine sl2 Jacobi with the trivial flip, level <= 2, window 4", 300, affine_jacobi},
      {4, "weak associativity with l <= 4 in every family", 8 * 300, weak_associativity},
      {5, "degeneracy witnesses for the dual numbers and d/dt", 20, degeneracy_witnesses},
      {6, "affine sl2 probe-z n=2, level <= 2, exponents in [-3,3] has full rank", 600, sl2_nondegeneracy},
      {7, "gr dims match colored partitions at levels 0-4", 120, pbw_dimensions},
      {8, "Delta_R identities and dressed-field pairing terms", 120, delta_suite},
      {9, "mode lists with sum >= 0 annihilate the vacuum in every family", 60, vacuum_vanishing},
      {10, "filtration containments for all fixtures to level 4", 60, filtration},
  };
  std::set<int> failed;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.note = std::string("exception: ") + e.what();
    }
    const double s = seconds_since(t0);
    if (s > c.limit) o.require(false, "over the time limit");
    if (!o.ok) failed.insert(c.id);
    char t[32];
    std::snprintf(t, sizeof t, "%.2fs", s);
    std::cout << "criterion " << c.id << ": " << (o.ok ? "PASS" : "FAIL") << "  " << c.title << "  [" << t << "]";
    if (!o.note.empty()) std::cout << "  " << o.note;
    if (!o.ok && expected.count(c.id)) std::cout << "  (known failure)";
    std::cout << "\n";
  }
  if (failed != expected) {
    std::cout << "acceptance: failing set differs from the expected one\n";
    return 1;
  }
  return 0;
}
