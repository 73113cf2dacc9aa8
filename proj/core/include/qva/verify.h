#pragma once

// Mechanical checks of the identities a weak quantum vertex algebra built from
// a spec must satisfy. Every check is a pure function of its inputs and
// returns a CheckReport with exact witnesses.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qva/field.h"
#include "qva/linalg.h"

namespace qva {

enum class Status { pass, fail, inconclusive };
std::string status_name(Status s);
// fail dominates inconclusive, which dominates pass
Status combine(Status a, Status b);

struct CheckReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
  Status status = Status::pass;
  std::vector<std::string> witnesses;
  std::string window;
  std::vector<std::pair<std::string, std::string>> details;
  double seconds = 0;

  void param(const std::string& k, const std::string& v) { params.emplace_back(k, v); }
  void param(const std::string& k, long v) { params.emplace_back(k, std::to_string(v)); }
  void detail(const std::string& k, const std::string& v) { details.emplace_back(k, v); }
  void detail(const std::string& k, long v) { details.emplace_back(k, std::to_string(v)); }
  // Records a failure with its witness; keeps at most max_witnesses of them.
  void fail(const std::string& witness, std::size_t max_witnesses = 20);
  void inconclusive(const std::string& why);
};

// Everything a check needs about one spec, built once.
class Context {
 public:
  explicit Context(AlgebraSpec spec, EngineOptions eo = {}, FieldOptions fo = {});
  const AlgebraSpec& spec() const { return module_.spec(); }
  const ModuleEngine& module() const { return module_; }
  const FieldEngine& fields() const { return fields_; }
  // Heisenberg Fock space with Delta_R; zf only.
  const DeltaEngine& delta() const;
  // Field generators and the basis of probe states up to a level.
  std::vector<int> generators() const { return module_.field_generators(); }
  std::vector<Monomial> probes(int max_level) const { return module_.enumerate_basis(max_level); }

 private:
  ModuleEngine module_;
  FieldEngine fields_;
  mutable std::unique_ptr<DeltaEngine> delta_;
  mutable std::mutex mu_;
};

// Whether a family satisfies the hypotheses of the W[k] filtration lemma
// (S(x) with values in H (x) H (x) C[[x]] and the <a,b> delta_{m+n+1,0} term).
bool hs_regime(Family f);

CheckReport check_structure_relations(const Context& ctx, int level, int window);

struct SlocalityResult {
  std::optional<int> k;             // smallest k with a consistent ansatz
  std::vector<STerm> row;           // S(v (x) u) as (b', a', f)
  bool unique = false;              // the ansatz had no kernel at this k
  int kernel_dim = 0;
  bool k_independent = false;       // the same row solves the system at k+1
};
SlocalityResult find_slocality(const Context& ctx, int a, int b, int k_max, int f_degree, int level, int window,
                               CheckReport* report = nullptr);

// S-Jacobi for Y(u,x1), Y(v,x2) on w with the row S(v (x) u); coefficients of
// x0^r x1^p x2^q for r, p, q in [-window, window].
CheckReport check_s_jacobi(const Context& ctx, int u, int v, const Monomial& w, const std::vector<STerm>& row,
                           int window);
// S row for (u, v) from the closed-form S of the spec, exact to the order the
// Jacobi window needs; nullopt when the family has no closed form.
std::optional<std::vector<STerm>> closed_form_row(const Context& ctx, int u, int v, int order);

struct AssocResult {
  std::optional<int> l;
};
CheckReport check_weak_assoc(const Context& ctx, const State& u, const State& v, const Monomial& w, int l_max,
                             int window, AssocResult* out = nullptr);

// S on span(generators + vacuum). Exact rows up to the given order.
CheckReport check_qyb(const AlgebraSpec& spec, const SMap& s, const std::vector<int>& basis, int order);
CheckReport check_unitarity(const AlgebraSpec& spec, const SMap& s, const std::vector<int>& basis, int order);

// find_slocality on all pairs of field generators, assembled into an SMap.
CheckReport extract_qyb_operator(const Context& ctx, int k_max, int f_degree, int level, int window,
                                 SMap* out = nullptr);

// Z_n on a finite probe basis. Coefficient functions are the monomials
// x^a with a in [-exp, exp]^n and x2^b...xn^c (x1 - x2)^{-d}, 1 <= d <= dmax;
// this set is linearly independent.
struct ProbeFunction {
  std::vector<int> exps;  // exponents of x1..xn
  int d = 0;              // power of (x1 - x2)^{-1}
};
struct ProbeColumn {
  std::vector<Monomial> slots;
  ProbeFunction f;
};
struct ProbeResult {
  int columns = 0;
  int rank = 0;
  bool full_rank_certified = false;
  std::vector<ProbeColumn> basis;
  std::vector<SparseVec> kernel;  // exact kernel vectors over column ids (window rows)
  std::vector<bool> kernel_verified;
  // Closed-form kernel elements built from ker D and from states with
  // D a = 1; each was checked against the probe matrix and by z_vanishes.
  std::vector<std::vector<std::pair<ProbeColumn, Rational>>> structural;
};
CheckReport nondegeneracy_probe(const Context& ctx, int n, int level, int exp, int dmax, ProbeResult* out = nullptr);
std::string describe_column(const Context& ctx, const ProbeColumn& c);
// Z_n applied to a combination of probe columns, as exact coefficients on a
// window; used to cross-check witnesses.
bool z_vanishes(const Context& ctx, const std::vector<std::pair<ProbeColumn, Rational>>& combo, int window);

CheckReport ker_d_probe(const Context& ctx, int level);

CheckReport check_filtration(const Context& ctx, int max_level);

CheckReport gr_dims_check(const Context& ctx, int max_level);

// Delta_R identities on states up to a level, to a given order in x.
CheckReport check_delta_suite(const Context& ctx, int level, int order, int window);

}  // namespace qva
