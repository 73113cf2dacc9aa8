#pragma once

// Fields on a vacuum module: generator fields, the vertex operators Y(v, x)
// built by iterated Y_E products, and the exp(x d) vertex operators of a
// differential algebra.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "qva/state.h"

namespace qva {

class Field {
 public:
  virtual ~Field() = default;
  // Coefficient of x^e of the field applied to w.
  virtual State coefficient(int e, const State& w) const = 0;
  // No terms below this exponent on a state of the given level.
  virtual int lower_bound(int level_w) const = 0;
  // Filtration level of the state the field comes from (0 for the identity).
  virtual int level() const = 0;
  virtual std::string describe() const = 0;

  SeriesState apply(const State& w, int level_w, int lo, int hi, const std::string& var = "x") const;
};

using FieldPtr = std::shared_ptr<const Field>;

struct NoAdmissibleK : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldOptions {
  // Extra exponents below the claimed lower bound that must vanish before a
  // k in the Y_E product is accepted.
  int certify_margin = 2;
};

class FieldEngine {
 public:
  explicit FieldEngine(const ModuleEngine& module, FieldOptions opt = {});
  FieldEngine(const FieldEngine&) = delete;
  FieldEngine& operator=(const FieldEngine&) = delete;

  const ModuleEngine& module() const { return module_; }

  // v_t w, the coefficient of x^{-t-1} in Y(v, x) w.
  State mode(const Monomial& v, int t, const Monomial& w) const;
  State mode(const State& v, int t, const State& w) const;

  FieldPtr identity_field() const;
  FieldPtr generator_field(int a) const;
  FieldPtr vertex_operator(const State& v) const;

  struct YeResult {
    SeriesState series;
    int k = 0;
  };
  // a(x)_n b(x) applied to a probe on the window [lo, hi] of x-exponents; the
  // k used is the smallest that passes certification, starting at k_min.
  YeResult ye_product(const Field& a, const Field& b, int n, const State& probe, int lo, int hi,
                      int k_min = 0) const;
  FieldPtr ye_product_field(FieldPtr a, FieldPtr b, int n) const;

  // The k chosen for the Y(v') step of Y(v) on w, where v = a(m) v'.
  int vertex_k(const Monomial& v, const Monomial& w) const;

  std::size_t memo_size() const;

 private:
  State mode_rec(const Monomial& v, int t, const Monomial& w) const;
  State f_coeff(int a, const Monomial& vp, const Monomial& w, int k, int p, int q) const;
  int find_k(const Monomial& v, const Monomial& w) const;

  const ModuleEngine& module_;
  FieldOptions opt_;

  struct Key {
    Monomial v;
    int t;
    Monomial w;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct PairHash {
    std::size_t operator()(const std::pair<Monomial, Monomial>& k) const noexcept;
  };
  mutable std::mutex mu_;
  mutable std::unordered_map<Key, State, KeyHash> memo_;
  mutable std::unordered_map<std::pair<Monomial, Monomial>, int, PairHash> kcache_;
};

// Y(a, x) b = (exp(x d) a) b for a differential algebra, as a series in x.
SeriesState exp_derivation_vertex(const ModuleEngine& module, int a, const State& b, int lo, int hi);

// Delta^{+-}(x) on the Heisenberg Fock space of a zf spec, and the dressed
// fields u_R(x) = u(x) Delta^+(x), u*_R(x) = u*(x) Delta^-(x).
class DeltaEngine {
 public:
  explicit DeltaEngine(const AlgebraSpec& zf_spec);
  DeltaEngine(const DeltaEngine&) = delete;
  DeltaEngine& operator=(const DeltaEngine&) = delete;

  const ModuleEngine& fock() const { return *fock_; }
  const AlgebraSpec& spec() const { return spec_; }
  const RMatrix& r() const { return r_; }

  // Coefficients D_0..D_order of Delta^{sign}(x) w.
  std::vector<State> apply(int sign, const Monomial& w, int order) const;
  std::vector<State> apply(int sign, const State& w, int order) const;

  // Delta^{sign}(x) a = sum_r a^(r) x^r on a generator.
  LinComb generator_coeff(int sign, int a, int r) const;
  // The sign of Delta in the dressed field of a generator.
  int dressing_sign(int a) const;

  State dressed_coefficient(int a, int e, const State& w) const;
  FieldPtr dressed_field(int a) const;

 private:
  AlgebraSpec spec_;
  RMatrix r_;
  std::unique_ptr<ModuleEngine> fock_;
  struct Entry {
    int order = -1;
    std::vector<State> coeffs;
  };
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, Monomial>, Entry> memo_;
};

std::vector<State> delta_r_apply(const DeltaEngine& engine, const State& s, int sign, int order);

}  // namespace qva
