#pragma once

#include <ostream>
#include <string>

#include "qva/algebra.h"
#include "qva/verify.h"

namespace qva {

// gtest printer: "c*[g(n) g(n)]" terms with generator indices
inline void PrintTo(const State& s, std::ostream* os) {
  if (s.is_zero()) *os << "0";
  bool first = true;
  for (const auto& [m, c] : s.terms()) {
    *os << (first ? "" : " + ") << to_string(c) << "*[";
    for (std::size_t i = 0; i < m.size(); ++i) *os << (i ? " " : "") << m[i].gen << "(" << m[i].n << ")";
    *os << "]";
    first = false;
  }
}

}  // namespace qva

namespace qva::test {

inline std::string fixture(const std::string& name) { return std::string(QVA_FIXTURE_DIR) + "/" + name + ".alg"; }
inline AlgebraSpec load(const std::string& name) { return load_spec(fixture(name)); }

inline Monomial mono(const AlgebraSpec& s, std::initializer_list<std::pair<const char*, int>> modes) {
  Monomial m;
  for (const auto& [g, n] : modes) m.push_back(Mode{s.index(g), n});
  return m;
}

inline Rational Q(long p, long q = 1) { return Rational(p, q); }

}  // namespace qva::test
