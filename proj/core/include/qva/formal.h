#pragma once

// Formal distribution calculus over Q: expansions of rational functions with
// binomial denominators in a chosen variable order, the formal delta function
// and its derivatives, products, residues and the f(x0 + x2) substitution.
//
// Everything is windowed. A WindowSeries knows the exact coefficients inside a
// box of exponents and, per variable, whether the true series is known to
// vanish below or above that box. Operations refuse to produce a coefficient
// they cannot certify.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qva/rational.h"

namespace qva {

using Exps = std::vector<int>;

struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A total order on a set of variable names, earliest first. Expanding
// (x_i - x_j)^n with x_i before x_j means expanding in nonnegative powers of
// x_j, i.e. landing in C((x_i))((x_j)).
class VarOrder {
 public:
  VarOrder() = default;
  explicit VarOrder(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  int position(const std::string& name) const;
  bool contains(const std::string& name) const;

 private:
  std::vector<std::string> names_;
};

struct Box {
  Exps lo, hi;
  bool contains(const Exps& e) const;
  std::size_t volume() const;
  static Box cube(std::size_t nvars, int lo, int hi);
};

class WindowSeries {
 public:
  WindowSeries() = default;
  WindowSeries(std::vector<std::string> vars, Box box);

  const std::vector<std::string>& vars() const { return vars_; }
  int var_index(const std::string& name) const;
  const Box& box() const { return box_; }
  const std::map<Exps, Rational>& terms() const { return terms_; }

  bool lower_certified(std::size_t v) const { return lower_[v]; }
  bool upper_certified(std::size_t v) const { return upper_[v]; }
  bool finite_in(std::size_t v) const { return lower_[v] && upper_[v]; }
  void certify_lower(std::size_t v, bool on = true) { lower_[v] = on; }
  void certify_upper(std::size_t v, bool on = true) { upper_[v] = on; }
  void certify_all();

  // Known zero outside the box in the certified directions; throws WindowError
  // if e falls where nothing is known.
  Rational coeff(const Exps& e) const;
  bool known_at(const Exps& e) const;

  void add(const Exps& e, const Rational& c);
  bool is_zero() const { return terms_.empty(); }

  WindowSeries restricted(const Box& b) const;
  WindowSeries& operator+=(const WindowSeries& o);
  WindowSeries& operator-=(const WindowSeries& o);
  WindowSeries& operator*=(const Rational& c);
  WindowSeries derivative(std::size_t v) const;

  // Coefficient-wise equality on the common box.
  bool equal_on(const WindowSeries& o, const Box& b) const;

  std::string to_string() const;

 private:
  std::vector<std::string> vars_;
  Box box_;
  std::vector<bool> lower_, upper_;
  std::map<Exps, Rational> terms_;
};

// A Laurent polynomial numerator times a product of powers of two-term linear
// forms (s_i x_i + s_j x_j)^n, n possibly negative, together with a
// variable order that fixes how each negative power is expanded.
class DirectedRational {
 public:
  struct Binomial {
    int i, j;    // variable indices, i != j
    int si, sj;  // +1 or -1
    int power;
  };

  DirectedRational() = default;
  DirectedRational(std::vector<std::string> vars, VarOrder order);

  static DirectedRational constant(std::vector<std::string> vars, VarOrder order, const Rational& c);
  static DirectedRational monomial(std::vector<std::string> vars, VarOrder order, const Exps& e,
                                   const Rational& c = 1);
  // (x_i - x_j)^power
  static DirectedRational difference(std::vector<std::string> vars, VarOrder order,
                                     const std::string& xi, const std::string& xj, int power);

  const std::vector<std::string>& vars() const { return vars_; }
  const VarOrder& order() const { return order_; }
  const std::map<Exps, Rational>& numerator() const { return numerator_; }
  const std::vector<Binomial>& binomials() const { return binomials_; }

  DirectedRational with_order(VarOrder order) const;
  DirectedRational operator*(const DirectedRational& o) const;
  DirectedRational& operator*=(const Rational& c);
  void add_numerator_term(const Exps& e, const Rational& c);
  void multiply_binomial(const Binomial& b);

  // Exact coefficient at e of the expansion in this object's order.
  Rational coefficient(const Exps& e) const;
  // Per-variable bounds on the support of the expansion, if finite.
  std::vector<std::optional<int>> lower_bounds() const;
  std::vector<std::optional<int>> upper_bounds() const;
  bool is_polynomial() const;

 private:
  std::vector<std::string> vars_;
  VarOrder order_;
  std::map<Exps, Rational> numerator_;
  std::vector<Binomial> binomials_;
};

// Coefficient * (1/j!) d^j/dx_b^j x_b^{-1} delta(x_a / x_b). The coefficient is
// a series over the same variables that does not involve x_a.
struct DeltaTerm {
  int j = 0;
  int a = 0, b = 1;
  WindowSeries coeff;
};

class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<WindowSeries>& series() const { return series_; }
  const std::vector<DeltaTerm>& deltas() const { return deltas_; }

  void add(const WindowSeries& s);
  void add(const DeltaTerm& d);  // merges terms with equal (j, a, b)
  Distribution& operator-=(const Distribution& o);

  Rational coeff(const Exps& e) const;
  WindowSeries expand(const Box& b) const;

 private:
  std::vector<std::string> vars_;
  std::vector<WindowSeries> series_;
  std::vector<DeltaTerm> deltas_;
};

// Expansion of f in its order, exact on the given box.
WindowSeries iota_expand(const DirectedRational& f, const Box& box);
WindowSeries iota_expand(const DirectedRational& f, const VarOrder& order, const Box& box);

// (1/j!) d^j/dx_b^j x_b^{-1} delta(x_a/x_b), as a two-variable distribution and
// as its expansion on a box.
DeltaTerm delta_term(const std::vector<std::string>& vars, const std::string& xa, const std::string& xb,
                     int j, const Rational& c = 1);
WindowSeries delta_series(const std::vector<std::string>& vars, const std::string& xa,
                          const std::string& xb, int j, const Box& box);

WindowSeries mul(const WindowSeries& a, const WindowSeries& b);
Distribution mul(const Distribution& a, const Distribution& b);
Distribution mul(const Distribution& a, const WindowSeries& b);

WindowSeries residue(const WindowSeries& s, const std::string& var);
Distribution residue(const Distribution& d, const std::string& var);

// f(x0 + x2) for f a Laurent polynomial in one variable, expanded in
// nonnegative powers of x2.
DirectedRational substitute_sum(const DirectedRational& f, const std::string& x0, const std::string& x2);
WindowSeries substitute_sum(const DirectedRational& f, const std::string& x0, const std::string& x2,
                            const Box& box);

}  // namespace qva
