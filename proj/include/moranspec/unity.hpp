#pragma once

// Exact vanishing test for finite sums of roots of unity
//   sum_k c_k exp(2 pi i x_k),  x_k rational.
//
// Decided exactly by splitting the cyclotomic field into prime-order
// tensor factors; cost is linear in the number of terms per prime.

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "moranspec/lattice.hpp"

namespace moranspec {

// x mod 1 in [0, 1).
inline Rat frac(const Rat& x) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return Rat(x - fl);
}

class UnityRootSum {
 public:
  struct Term {
    Rat exponent;  // reduced mod 1
    Int multiplicity;
  };

  UnityRootSum() = default;

  void add(const Rat& exponent, const Int& multiplicity = 1) {
    terms_.push_back({frac(exponent), multiplicity});
  }

  [[nodiscard]] const std::vector<Term>& terms() const noexcept {
    return terms_;
  }

  // Least common denominator of the exponents.
  [[nodiscard]] Int common_denominator() const {
    Int q = 1;
    for (const auto& t : terms_) {
      mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), t.exponent.get_den_mpz_t());
    }
    return q;
  }

 private:
  std::vector<Term> terms_;
};

namespace detail {

// Primes dividing n, ascending; trial division shrinks n as it goes.
inline std::vector<Int> prime_factors(Int n) {
  std::vector<Int> out;
  for (Int p = 2; p * p <= n; ++p) {
    if (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
      out.push_back(p);
      while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline Int mod(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Int inverse_mod(const Int& a, const Int& m) {
  Int r;
  mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

using Coeffs = std::map<Int, Int>;  // exponent mod r -> multiplicity, r squarefree

// Q(zeta_r) = Q(zeta_p) (x) Q(zeta_{r/p}), and over the second factor the
// relation 1 + zeta_p + ... + zeta_p^{p-1} = 0 is the only one. So
// sum_a zeta_p^a X_a vanishes iff all X_a are equal.
inline bool squarefree_zero(const Coeffs& c, const Int& r,
                            std::span<const Int> primes) {
  if (primes.empty()) {
    Int total = 0;
    for (const auto& [e, m] : c) total += m;
    return total == 0;
  }
  const Int& p = primes.back();
  const Int rest = r / p;
  const Int inv_rest = inverse_mod(rest, p);
  const Int inv_p = rest == 1 ? Int(0) : inverse_mod(p, rest);
  std::map<Int, Coeffs> split;  // a -> X_a, exponents mod r/p
  for (const auto& [e, m] : c) {
    if (m == 0) continue;
    // e/r = a/p + b/(r/p) mod 1.
    split[mod(Int(e * inv_rest), p)][rest == 1 ? Int(0) : mod(Int(e * inv_p), rest)] += m;
  }
  const auto sub = primes.first(primes.size() - 1);
  const Coeffs empty;
  const Int zero = 0;
  const Coeffs& x0 = split.count(zero) ? split[zero] : empty;
  for (Int a = 1; a < p; ++a) {
    Coeffs diff = split.count(a) ? split[a] : empty;
    for (const auto& [e, m] : x0) diff[e] -= m;
    if (!squarefree_zero(diff, rest, sub)) return false;
  }
  return true;
}

}  // namespace detail

// Exact: true iff the sum of roots of unity is zero. With q = r s, r the
// radical of q, Q(zeta_q) is free over Q(zeta_r) on zeta_q^0..zeta_q^{s-1},
// so each residue class of exponents mod s must vanish on its own.
inline bool unity_sum_is_zero(const UnityRootSum& s) {
  if (s.terms().empty()) return true;
  const Int q = s.common_denominator();
  const std::vector<Int> primes = detail::prime_factors(q);
  Int r = 1;
  for (const auto& p : primes) r *= p;
  const Int step = q / r;
  std::map<Int, detail::Coeffs> classes;
  for (const auto& t : s.terms()) {
    const Int e = t.exponent.get_num() * (q / t.exponent.get_den());
    const Int j = detail::mod(e, step);
    classes[j][Int((e - j) / step)] += t.multiplicity;
  }
  for (const auto& [j, c] : classes) {
    if (!detail::squarefree_zero(c, r, primes)) return false;
  }
  return true;
}

// Four unit roots sum to zero iff they split into two antipodal pairs.
inline bool four_term_antipodal_zero(const std::array<Rat, 4>& x) {
  const Rat half(1, 2);
  auto antipodal = [&](const Rat& a, const Rat& b) {
    return frac(Rat(a - b)) == half;
  };
  return (antipodal(x[0], x[1]) && antipodal(x[2], x[3])) ||
         (antipodal(x[0], x[2]) && antipodal(x[1], x[3])) ||
         (antipodal(x[0], x[3]) && antipodal(x[1], x[2]));
}

}  // namespace moranspec
