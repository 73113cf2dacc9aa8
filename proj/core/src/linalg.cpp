#include "qva/linalg.h"

#include <stdexcept>

namespace qva {

namespace {

Integer content(const IntVec& v) {
  Integer g = 0;
  for (const auto& [i, c] : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

// r := a*r - b*s on sorted sparse vectors
IntVec combine(const Integer& a, const IntVec& r, const Integer& b, const IntVec& s) {
  IntVec out;
  out.reserve(r.size() + s.size());
  std::size_t i = 0, j = 0;
  while (i < r.size() || j < s.size()) {
    if (j == s.size() || (i < r.size() && r[i].first < s[j].first)) {
      out.emplace_back(r[i].first, a * r[i].second);
      ++i;
    } else if (i == r.size() || s[j].first < r[i].first) {
      out.emplace_back(s[j].first, -b * s[j].second);
      ++j;
    } else {
      Integer c = a * r[i].second - b * s[j].second;
      if (c != 0) out.emplace_back(r[i].first, std::move(c));
      ++i;
      ++j;
    }
  }
  return out;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t reduce_mod(const Integer& z, std::uint64_t p) {
  Integer m;
  mpz_fdiv_r_ui(m.get_mpz_t(), z.get_mpz_t(), p);
  return m.get_ui();
}

}  // namespace

IntVec primitive(const SparseVec& v) {
  Integer l = 1;
  for (const auto& [i, c] : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  IntVec out;
  out.reserve(v.size());
  for (const auto& [i, c] : v) {
    if (c == 0) continue;
    Integer z = c.get_num() * (l / c.get_den());
    out.emplace_back(i, std::move(z));
  }
  Integer g = content(out);
  if (g > 1)
    for (auto& [i, c] : out) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  if (!out.empty() && out[0].second < 0)
    for (auto& [i, c] : out) c = -c;
  return out;
}

void Echelon::reduce(Row& r) const {
  while (!r.v.empty()) {
    auto it = pivots_.find(r.v[0].first);
    if (it == pivots_.end()) return;
    const Row& p = it->second;
    const Integer a = p.v[0].second, b = r.v[0].second;
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    const Integer ag = a / g, bg = b / g;
    r.v = combine(ag, r.v, bg, p.v);
    if (track_) r.combo = combine(ag, r.combo, bg, p.combo);
    Integer c = content(r.v);
    if (track_) {
      Integer cc = content(r.combo);
      mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), cc.get_mpz_t());
    }
    if (c > 1) {
      for (auto& [i, x] : r.v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
      for (auto& [i, x] : r.combo) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
    }
  }
}

std::optional<SparseVec> Echelon::insert(const SparseVec& column) {
  const int id = inserted_++;
  Row r;
  if (track_) {
    // integral multiple l * column, with the multiplier kept in the combination
    Integer l = 1;
    for (const auto& [i, c] : column) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    for (const auto& [i, c] : column)
      if (c != 0) r.v.emplace_back(i, c.get_num() * (l / c.get_den()));
    r.combo = {{id, l}};
  } else {
    r.v = primitive(column);
  }
  reduce(r);
  if (r.v.empty()) {
    if (!track_) return SparseVec{};
    SparseVec k;
    for (const auto& [i, c] : r.combo) k.emplace_back(i, Rational(c));
    return k;
  }
  if (r.v[0].second < 0) {
    for (auto& [i, c] : r.v) c = -c;
    for (auto& [i, c] : r.combo) c = -c;
  }
  const int lead = r.v[0].first;
  pivots_.emplace(lead, std::move(r));
  return std::nullopt;
}

KernelResult exact_kernel(const std::vector<SparseVec>& columns) {
  Echelon e(true);
  KernelResult res;
  for (const auto& c : columns) {
    auto k = e.insert(c);
    if (k) res.kernel.push_back(std::move(*k));
  }
  res.rank = e.rank();
  return res;
}

std::optional<std::vector<Rational>> exact_solve(const std::vector<SparseVec>& columns, const SparseVec& rhs) {
  Echelon e(true);
  for (const auto& c : columns) e.insert(c);
  auto k = e.insert(rhs);
  if (!k) return std::nullopt;
  const int rid = static_cast<int>(columns.size());
  Rational rc = 0;
  for (const auto& [i, c] : *k)
    if (i == rid) rc = c;
  if (rc == 0) return std::nullopt;
  std::vector<Rational> x(columns.size(), Rational(0));
  for (const auto& [i, c] : *k)
    if (i != rid) x[static_cast<std::size_t>(i)] = -c / rc;
  return x;
}

bool ModEchelon::insert(const SparseVec& column) {
  std::map<int, std::uint64_t> v;
  for (const auto& [i, c] : column) {
    if (c == 0) continue;
    const std::uint64_t d = reduce_mod(c.get_den(), p_);
    if (d == 0) throw std::domain_error("denominator divisible by the modulus");
    const std::uint64_t x = mulmod(reduce_mod(c.get_num(), p_), powmod(d, p_ - 2, p_), p_);
    if (x) v[i] = x;
  }
  while (!v.empty()) {
    auto it = pivots_.find(v.begin()->first);
    if (it == pivots_.end()) break;
    const std::uint64_t f = v.begin()->second;  // pivots are normalized to lead 1
    for (const auto& [i, c] : it->second) {
      std::uint64_t& slot = v[i];
      slot = (slot + p_ - mulmod(f, c, p_)) % p_;
      if (slot == 0) v.erase(i);
    }
  }
  if (v.empty()) return false;
  const std::uint64_t inv = powmod(v.begin()->second, p_ - 2, p_);
  std::vector<std::pair<int, std::uint64_t>> row;
  row.reserve(v.size());
  for (const auto& [i, c] : v) row.emplace_back(i, mulmod(c, inv, p_));
  pivots_.emplace(row[0].first, std::move(row));
  return true;
}

}  // namespace qva
