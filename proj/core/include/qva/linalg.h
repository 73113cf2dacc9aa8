#pragma once

// Exact linear algebra on sparse vectors: incremental fraction-free row
// echelon form over Z (for ranks, kernels and linear solves over Q) and a
// modular variant used only to certify full rank quickly.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qva/rational.h"

namespace qva {

using SparseVec = std::vector<std::pair<int, Rational>>;
using IntVec = std::vector<std::pair<int, Integer>>;

// Scales to a primitive integer vector with positive leading entry.
IntVec primitive(const SparseVec& v);

// Columns are inserted one at a time. Each stored pivot vector remembers
// which combination of the inserted columns produced it, so a dependent
// column yields an exact kernel vector.
class Echelon {
 public:
  explicit Echelon(bool track_combinations = false) : track_(track_combinations) {}

  // Returns the kernel relation (coefficients over inserted column ids, with
  // the new column included) when the column is dependent.
  std::optional<SparseVec> insert(const SparseVec& column);
  int rank() const { return static_cast<int>(pivots_.size()); }
  int inserted() const { return inserted_; }

 private:
  struct Row {
    IntVec v;
    IntVec combo;
  };
  void reduce(Row& r) const;

  bool track_;
  int inserted_ = 0;
  std::map<int, Row> pivots_;  // keyed by leading index
};

// Rank and a kernel basis of the matrix whose columns are given.
struct KernelResult {
  int rank = 0;
  std::vector<SparseVec> kernel;  // over column indices
};
KernelResult exact_kernel(const std::vector<SparseVec>& columns);

// Solves sum_c x_c columns[c] = rhs exactly; nullopt if inconsistent. Free
// variables are set to zero.
std::optional<std::vector<Rational>> exact_solve(const std::vector<SparseVec>& columns, const SparseVec& rhs);

// Rank modulo a prime. A modular rank equal to the column count certifies
// full column rank over Q; a smaller one proves nothing.
class ModEchelon {
 public:
  explicit ModEchelon(std::uint64_t prime = 2147483629ull) : p_(prime) {}
  // Throws std::domain_error if a denominator vanishes mod p.
  bool insert(const SparseVec& column);
  int rank() const { return static_cast<int>(pivots_.size()); }
  std::uint64_t prime() const { return p_; }

 private:
  std::uint64_t p_;
  std::map<int, std::vector<std::pair<int, std::uint64_t>>> pivots_;
};

}  // namespace qva
