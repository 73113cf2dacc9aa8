#include "qva/rational.h"

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace qva {

namespace {

std::uint64_t binom_key(long n, long k) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) |
         static_cast<std::uint32_t>(k);
}

}  // namespace

Integer binom(long n, long k) {
  if (k < 0) return 0;
  if (n >= 0 && k > n) return 0;
  // Small-argument cache: the checks hammer the same handful of values.
  static std::mutex mu;
  static std::unordered_map<std::uint64_t, Integer> cache;
  const bool cacheable = n > -4096 && n < 4096 && k < 4096;
  if (cacheable) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(binom_key(n, k));
    if (it != cache.end()) return it->second;
  }
  Integer r;
  if (n >= 0) {
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  } else {
    // C(-m, k) = (-1)^k C(m + k - 1, k)
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(-n + k - 1), static_cast<unsigned long>(k));
    if (k % 2) r = -r;
  }
  if (cacheable) {
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(binom_key(n, k), r);
  }
  return r;
}

Integer factorial(long n) {
  if (n < 0) throw std::domain_error("factorial of negative integer");
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto strip = [](std::string& t) {
    auto b = t.find_first_not_of(" \t");
    auto e = t.find_last_not_of(" \t");
    t = b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
  };
  strip(s);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  auto check_int = [](const std::string& t) {
    std::size_t i = (t.size() > 1 && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  strip(num);
  strip(den);
  if (!check_int(num) || !check_int(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("malformed rational '" + s + "'");
  if (num[0] == '+') num.erase(0, 1);
  Integer n(num), d(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace qva
