#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace baire {

// All interval and measure arithmetic is exact; no floating point anywhere.
using Rational = mpq_class;
using BigInt = mpz_class;

inline std::string rational_str(const Rational& q) { return q.get_str(); }

inline Rational parse_rational(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0 || mpz_sgn(q.get_den_mpz_t()) == 0)
    throw std::invalid_argument("not a rational: '" + s + "'");
  q.canonicalize();
  return q;
}

inline BigInt pow_big(std::uint64_t base, std::uint64_t exp) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

// 2^-k as an exact rational.
inline Rational pow2_neg(std::uint64_t k) {
  BigInt d = 1;
  d <<= k;
  return Rational(1, d);
}

// Least k >= 0 with q * 2^-k <= bound, for q, bound > 0.
inline std::uint64_t shrink_exponent(const Rational& q, const Rational& bound) {
  if (q <= bound) return 0;
  // want 2^k >= q/bound, i.e. k = ceil(log2(num/den)) of the positive ratio
  Rational ratio = q / bound;
  BigInt num = ratio.get_num(), den = ratio.get_den();
  // ceil(num/den) - 1 has bit length k0 such that 2^k0 is the answer unless
  // num/den is an exact power of two one below; just search from the bit hint.
  std::uint64_t k = 0;
  BigInt c = (num + den - 1) / den;  // ceil(num/den) >= 2
  k = mpz_sizeinbase(c.get_mpz_t(), 2) - 1;
  BigInt p = 1;
  p <<= k;
  while (p * den < num) {
    p <<= 1;
    ++k;
  }
  return k;
}

// The standard enumeration of the dyadic rationals in (0,1):
// d_1 = 1/2, d_2 = 1/4, d_3 = 3/4, d_4 = 1/8, d_5 = 3/8, ...
// (level a >= 0 lists odd numerators over 2^(a+1); k = 2^a + b, b < 2^a).
inline Rational dyadic_rational(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("dyadic enumeration starts at 1");
  std::uint64_t a = 63;
  while (!(k >> a)) --a;  // a = floor(log2 k)
  std::uint64_t b = k - (std::uint64_t{1} << a);
  BigInt den = 1;
  den <<= (a + 1);
  return Rational(BigInt(2 * b + 1), den);
}

}  // namespace baire
