#pragma once

// Mask polynomials m_D(xi) = (1/#D) sum_{d in D} exp(2 pi i <d, xi>), exact
// zero tests on rational points, and Hadamard-triple verification.

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "moranspec/digitsets.hpp"
#include "moranspec/error.hpp"
#include "moranspec/lattice.hpp"
#include "moranspec/unity.hpp"

namespace moranspec {

// Double-precision evaluation. Phases are reduced mod 1 before scaling by
// 2 pi so integer shifts of xi do not cost accuracy.
inline std::complex<double> eval_mask(std::span<const Vec2d> digits,
                                      const Vec2d& xi) {
  std::complex<double> acc = 0.0;
  for (const auto& d : digits) {
    double phase = d.x * xi.x + d.y * xi.y;
    phase -= std::round(phase);
    acc += std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  return acc / static_cast<double>(digits.size());
}

inline std::vector<Vec2d> to_double(std::span<const IntVec2> digits) {
  std::vector<Vec2d> out;
  out.reserve(digits.size());
  for (const auto& d : digits) out.push_back(to_double(d));
  return out;
}

inline std::complex<double> eval_mask(const DigitSet& d, const Vec2d& xi) {
  const auto pts = to_double(elements(d));
  return eval_mask(pts, xi);
}

// m_D(xi) = 0 for D = Q canonical, via m_D(xi) = m_canonical(Q^t xi) and
// Z(m_canonical) = (1/2)(Z^2 \ 2Z^2).
inline bool mask_zero_exact(const StructuredDigitSet& d, const RatVec2& xi) {
  const RatVec2 h = to_rational(transpose(d.q_matrix())) * xi;
  const RatVec2 twice{Rat(2 * h.x), Rat(2 * h.y)};
  if (!is_integral(twice)) return false;
  return mpz_odd_p(twice.x.get_num_mpz_t()) ||
         mpz_odd_p(twice.y.get_num_mpz_t());
}

// Exact test for any finite digit set through the cyclotomic kernel; four
// digits take the antipodal-pairing path.
inline bool mask_zero_exact_generic(std::span<const IntVec2> digits,
                                    const RatVec2& xi) {
  if (digits.size() == 4) {
    std::array<Rat, 4> x;
    for (std::size_t i = 0; i < 4; ++i) x[i] = dot(to_rational(digits[i]), xi);
    return four_term_antipodal_zero(x);
  }
  UnityRootSum s;
  for (const auto& d : digits) s.add(dot(to_rational(d), xi));
  return unity_sum_is_zero(s);
}

inline bool mask_zero_exact_generic(const GenericDigitSet& d,
                                    const RatVec2& xi) {
  return mask_zero_exact_generic(d.elements(), xi);
}

inline bool mask_zero_exact(const DigitSet& d, const RatVec2& xi) {
  if (const auto* s = std::get_if<StructuredDigitSet>(&d)) {
    return mask_zero_exact(*s, xi);
  }
  return mask_zero_exact_generic(std::get<GenericDigitSet>(d), xi);
}

// ------------------------------------------------------------- Hadamard

namespace detail {

inline void check_triple_shape(const IntMat2& m, std::size_t digits,
                               std::size_t companions) {
  if (det(m) == 0) throw error(errc::singular_matrix, "M is singular");
  if (digits != companions) {
    throw error(errc::cardinality_mismatch,
                "#D = " + std::to_string(digits) +
                    " but #L = " + std::to_string(companions));
  }
}

inline void check_distinct(std::span<const RatVec2> pts) {
  std::set<RatVec2> seen;
  for (const auto& p : pts) {
    if (!seen.insert(p).second) {
      throw error(errc::duplicate_digits,
                  "companion point " + to_string(p) + " repeated");
    }
  }
}

}  // namespace detail

// (M, D, L) is a Hadamard triple iff m_D((M*)^{-1}(l1 - l2)) = 0 for all
// distinct l1, l2 in L. m_D(-x) is the conjugate of m_D(x), so unordered
// pairs suffice. L may be rational (first-level companions of a tower).
inline bool is_hadamard_triple(const IntMat2& m, const DigitSet& d,
                               std::span<const RatVec2> companions) {
  detail::check_triple_shape(m, cardinality(d), companions.size());
  detail::check_distinct(companions);
  const RatMat2 back = inverse(transpose(m));
  for (std::size_t i = 0; i < companions.size(); ++i) {
    for (std::size_t j = i + 1; j < companions.size(); ++j) {
      if (!mask_zero_exact(d, back * (companions[i] - companions[j]))) {
        return false;
      }
    }
  }
  return true;
}

inline std::vector<RatVec2> to_rational(std::span<const IntVec2> pts) {
  std::vector<RatVec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(to_rational(p));
  return out;
}

inline bool is_hadamard_triple(const IntMat2& m, const DigitSet& d,
                               std::span<const IntVec2> companions) {
  const auto rat = to_rational(companions);
  return is_hadamard_triple(m, d, std::span<const RatVec2>(rat));
}

inline bool is_hadamard_triple(const IntMat2& m, const DigitSet& d,
                               const GenericDigitSet& companions) {
  return is_hadamard_triple(m, d,
                            std::span<const IntVec2>(companions.elements()));
}

// max |H* H - I| for H = (1/sqrt #D)(exp(2 pi i <M^{-1} d, l>)), computed
// directly in floating point.
inline double hadamard_unitarity_residual(const IntMat2& m, const DigitSet& d,
                                          std::span<const RatVec2> companions) {
  detail::check_triple_shape(m, cardinality(d), companions.size());
  const RatMat2 minv = inverse(m);
  std::vector<Vec2d> contracted;
  for (const auto& v : elements(d)) {
    contracted.push_back(to_double(minv * to_rational(v)));
  }
  const std::size_t n = contracted.size();
  std::vector<Vec2d> ls;
  for (const auto& l : companions) ls.push_back(to_double(l));
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      std::complex<double> acc = 0.0;
      for (const auto& x : contracted) {
        const double phase = x.x * (ls[b].x - ls[a].x) + x.y * (ls[b].y - ls[a].y);
        acc += std::polar(1.0, 2.0 * std::numbers::pi * phase);
      }
      acc /= static_cast<double>(n);
      worst = std::max(worst, std::abs(acc - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// sum_{l in L} |m_D((M*)^{-1}(xi + l))|^2; identically 1 for Hadamard triples.
inline double partition_of_unity_sum(const IntMat2& m, const DigitSet& d,
                                     std::span<const RatVec2> companions,
                                     const Vec2d& xi) {
  const Mat2d back = to_double(inverse(transpose(m)));
  const auto pts = to_double(elements(d));
  double total = 0.0;
  for (const auto& l : companions) {
    const Vec2d shifted = xi + to_double(l);
    total += std::norm(eval_mask(pts, back * shifted));
  }
  return total;
}

}  // namespace moranspec
