#pragma once

// Vacuum modules: normal-form monomials a1(n1)...ar(nr)|0> and the action of
// generator modes on them.

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qva/algebra.h"
#include "qva/rational.h"

namespace qva {

struct Mode {
  int gen = 0;
  int n = 0;
  bool operator==(const Mode&) const = default;
};

// Normal order: n ascending, ties broken by generator index.
inline bool mode_before(const Mode& x, const Mode& y) { return x.n != y.n ? x.n < y.n : x.gen < y.gen; }
inline bool operator<(const Mode& x, const Mode& y) { return mode_before(x, y); }

using Monomial = std::vector<Mode>;

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

class State {
 public:
  using Map = std::map<Monomial, Rational>;

  State() = default;
  static State vacuum() { return basis({}); }
  static State basis(const Monomial& m, const Rational& c = 1);

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rational coeff(const Monomial& m) const;

  void add(const Monomial& m, const Rational& c);
  void add(const State& o, const Rational& c = 1);
  State& operator+=(const State& o) { add(o, 1); return *this; }
  State& operator-=(const State& o) { add(o, -1); return *this; }
  State& operator*=(const Rational& c);
  bool operator==(const State& o) const = default;

 private:
  Map terms_;
};

State operator*(const Rational& c, State s);
State operator+(State a, const State& b);
State operator-(State a, const State& b);

// Coefficient of a formal series in one variable with State coefficients,
// exact on [lo, hi].
struct SeriesState {
  std::string var = "x";
  int lo = 0, hi = -1;
  bool lower_certified = false;
  std::map<int, State> coeffs;

  const State& at(int e) const;  // throws outside the window unless certified zero
};

struct StraighteningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineOptions {
  bool memoize = true;
  // Straightening recursion may not exceed depth_factor * level^2 (+ a small
  // constant) before the engine reports a non-terminating rewrite.
  int depth_factor = 10;
};

class ModuleEngine {
 public:
  explicit ModuleEngine(AlgebraSpec spec, EngineOptions opt = {});
  ModuleEngine(const ModuleEngine&) = delete;
  ModuleEngine& operator=(const ModuleEngine&) = delete;

  const AlgebraSpec& spec() const { return spec_; }

  int level(const Monomial& m) const;
  int level(const State& s) const;  // max over terms; -1 for the zero state
  bool is_normal(const Monomial& m) const;

  State apply_mode(int gen, int n, const Monomial& m) const;
  State apply_mode(int gen, int n, const State& s) const;
  // modes[0] acts last: a1(n1) a2(n2) ... ar(nr) |0>
  State act_monomial_on_vacuum(const std::vector<Mode>& modes) const;

  // Normal-form basis up to a level, ordered by level then lexicographically.
  std::vector<Monomial> enumerate_basis(int max_level) const;
  // Generators whose fields are the primary fields of the family.
  std::vector<int> field_generators() const;
  // State of the generator a as a vector (a(-1)|0>, or the basis element).
  State generator_state(int a) const;

  std::string to_string(const Monomial& m) const;
  std::string to_string(const State& s) const;

  // zf only: S rows exact to at least the given order.
  std::vector<STerm> zf_row(int b, int a, int order) const;

  std::size_t memo_size() const;

 private:
  State apply_rec(int a, int n, const Monomial& m, int budget) const;
  State apply_rec(int a, int n, const State& s, int budget) const;
  State apply_lie(int a, int n, const Monomial& m, int budget) const;
  State apply_zf(int a, int n, const Monomial& m, int budget) const;
  State apply_derivation(int a, int n, const Monomial& m) const;

  AlgebraSpec spec_;
  EngineOptions opt_;
  std::optional<int> unit_;

  struct Key {
    int a, n;
    Monomial m;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  mutable std::mutex memo_mu_;
  mutable std::unordered_map<Key, State, KeyHash> memo_;

  mutable std::mutex zf_mu_;
  mutable std::optional<SMap> zf_s_;
  mutable int zf_order_ = -1;
};

struct GrDims {
  bool comparison_available = false;
  std::string reason;                // why the comparison is unavailable
  std::vector<long> actual;          // dim gr_k for k = 0..L
  std::vector<long> free_expected;   // colored partition counts
  std::vector<long> cumulative;      // dim W[k]
};

// Graded dimensions of the level filtration, computed as ranks of all words
// in creation modes. For zf the words act through the dressed fields on the
// Heisenberg Fock space; there the comparison needs R0 = 1.
GrDims gr_dimensions(const ModuleEngine& engine, int max_level);

// Number of multisets of (color, part) with total part size k, parts >= 1.
long colored_partitions(int colors, int k);

}  // namespace qva
