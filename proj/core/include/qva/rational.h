#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace qva {

using Rational = mpq_class;
using Integer = mpz_class;

// Generalized binomial coefficient C(n, k) for any integer n and k >= 0.
// Zero for k < 0.
Integer binom(long n, long k);
Integer factorial(long n);

// Accepts "p", "-p", "p/q". Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form, always with a denominator.
std::string to_string(const Rational& r);

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

}  // namespace qva
