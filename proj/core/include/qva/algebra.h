#pragma once

// Algebra specifications: the six families, their text format, validation and
// the braiding data S(x) each family induces.

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qva/rational.h"

namespace qva {

enum class Family { affine, half_current, heisenberg, zf, semidirect, derivation };

std::string family_name(Family f);
Family parse_family(const std::string& name);

// Sparse linear combination of generators (or basis elements), sorted by index.
using LinComb = std::vector<std::pair<int, Rational>>;
void lincomb_add(LinComb& into, int idx, const Rational& c);
LinComb lincomb_scaled(const LinComb& a, const Rational& c);

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(int rows, int cols);
  static QMatrix identity(int n);

  int rows() const { return r_; }
  int cols() const { return c_; }
  Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * c_ + j)]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * c_ + j)]; }

  QMatrix operator*(const QMatrix& o) const;
  QMatrix operator+(const QMatrix& o) const;
  QMatrix operator-(const QMatrix& o) const;
  QMatrix scaled(const Rational& c) const;
  QMatrix transposed() const;
  std::optional<QMatrix> inverse() const;
  bool is_zero() const;
  bool operator==(const QMatrix& o) const = default;

 private:
  int r_ = 0, c_ = 0;
  std::vector<Rational> a_;
};

struct OrderExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// R(x) = sum_k R_k x^k acting on U. By default the listed coefficients are the
// whole polynomial; a truncated R only knows coefficients up to its order and
// every derived series inherits that limit.
class RMatrix {
 public:
  RMatrix() = default;
  RMatrix(std::vector<QMatrix> coeffs, bool truncated, QMatrix pairing);
  RMatrix(const RMatrix& o);
  RMatrix& operator=(const RMatrix& o);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  int dim() const { return coeffs_.empty() ? 0 : coeffs_[0].rows(); }
  bool truncated() const { return truncated_; }
  const std::vector<QMatrix>& coeffs() const { return coeffs_; }
  const QMatrix& pairing() const { return pairing_; }

  QMatrix coeff(int k) const;
  QMatrix inverse_coeff(int k) const;       // (R^{-1})_k
  QMatrix star_coeff(int k) const;          // R* = dual of R^{-1}, acting on U*
  QMatrix star_inverse_coeff(int k) const;  // (R*)^{-1} = dual of R

 private:
  QMatrix dual(const QMatrix& m) const;
  void check_order(int k) const;

  std::vector<QMatrix> coeffs_;
  bool truncated_ = false;
  QMatrix pairing_;  // pairing_(i, j) = <dual_i, U_j>
  mutable std::mutex mu_;
  mutable std::vector<QMatrix> inv_;
};

struct ZfData {
  int order = 0;
  bool truncated = false;
  std::vector<QMatrix> R;
  std::vector<int> U, dual;
};

struct SemidirectData {
  std::vector<int> ideal, subalgebra;
};

struct DerivationData {
  std::map<std::pair<int, int>, LinComb> mult;
  std::map<int, LinComb> d;
  std::map<int, int> grade;
  std::optional<int> degree_bound;
};

struct AlgebraSpec {
  Family family = Family::affine;
  Rational level = 0;
  std::vector<std::string> generators;
  std::map<std::pair<int, int>, LinComb> bracket;  // as written
  std::map<std::pair<int, int>, Rational> form;    // as written
  std::optional<ZfData> rmatrix;
  std::optional<SemidirectData> semidirect;
  std::optional<DerivationData> derivation;

  int size() const { return static_cast<int>(generators.size()); }
  int index(const std::string& name) const;  // throws SpecError
  std::optional<int> find(const std::string& name) const;

  // [a,b] completed by antisymmetry; empty if neither order was given.
  LinComb bracket_of(int a, int b) const;
  // <a,b>; for skew families the missing order is filled by skew symmetry,
  // otherwise by symmetry.
  Rational form_of(int a, int b) const;

  // Derivation family helpers.
  LinComb mult_of(int a, int b) const;
  LinComb d_of(int a) const;
  std::optional<int> unit() const;
  int grade_of(int a) const;

  // Generators whose modes a(m), m >= 0, exist (others are half-currents).
  bool has_nonnegative_modes(int a) const;
  // Whether a generator lives in U* of a zf or heisenberg spec.
  bool in_dual(int a) const;

  RMatrix r_matrix() const;  // zf only

  bool operator==(const AlgebraSpec& o) const;
};

AlgebraSpec parse_spec(const std::string& text);
AlgebraSpec load_spec(const std::string& path);
std::string print_spec(const AlgebraSpec& spec);

struct Diagnostic {
  enum class Severity { error, warning };
  Severity severity;
  std::string check;
  std::string message;
};

struct ValidationResult {
  std::vector<Diagnostic> diagnostics;
  bool ok() const;
};

ValidationResult validate(const AlgebraSpec& spec);

// S(x)(b (x) a) = sum_i b^(i) (x) a^(i) (x) f_i(x). Index -1 is the vacuum.
constexpr int kVacuum = -1;

struct STerm {
  int b = 0, a = 0;
  std::map<int, Rational> f;  // exponent -> coefficient
};

struct SMap {
  std::map<std::pair<int, int>, std::vector<STerm>> rows;  // key (b, a)
  // Coefficients of every f_i are exact up to and including this order.
  // Unset means every row is an exact Laurent polynomial.
  std::optional<int> exact_to;

  const std::vector<STerm>* row(int b, int a) const;
  // Rows for the vacuum pairs default to the identity.
  std::vector<STerm> row_or_identity(int b, int a) const;
  void add(int b, int a, int bo, int ao, int exponent, const Rational& c);
  void normalize();
  bool operator==(const SMap& o) const;
};

struct NoClosedForm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The braiding a family's defining relations induce on generators (with the
// vacuum where the family needs it). For zf the rows are power series and are
// exact to the requested order.
SMap induced_smap(const AlgebraSpec& spec, int order = -1);

}  // namespace qva
