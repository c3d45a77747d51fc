#pragma once

// Shorthand constructors shared by the test suites.

#include <string>
#include <vector>

#include "moranspec/moran.hpp"
#include "oracles.hpp"

namespace fx {

using namespace moranspec;

inline IntMat2 mat(long a, long b, long c, long d) {
  return {Int(a), Int(b), Int(c), Int(d)};
}
inline IntMat2 scalar(long s) { return IntMat2::scalar(Int(s)); }
inline IntMat2 from(const oracle::M& m) {
  return {Int(static_cast<long>(m[0])), Int(static_cast<long>(m[1])),
          Int(static_cast<long>(m[2])), Int(static_cast<long>(m[3]))};
}
inline IntVec2 iv(long x, long y) { return {Int(x), Int(y)}; }
inline Rat q(long n, long d = 1) { return make_rat(Int(n), Int(d)); }
inline RatVec2 rv(const Rat& x, const Rat& y) { return {x, y}; }

inline DigitSet D(long t = 1) { return scaled_canonical(Int(t)); }

inline MoranSystem constant(const IntMat2& m, long t = 1) {
  return MoranSystem::constant(m, D(t));
}
inline MoranSystem constant(const IntMat2& m, DigitSet d) {
  return MoranSystem::constant(m, std::move(d));
}

inline GenericDigitSet d_plus_6d() {
  return sum_set(as_generic(canonical_D()), dilate(Int(6), canonical_D()));
}

// sigma = prefix cycle^inf over t-values, with constant matrix m.
inline WordSystem word(std::vector<std::size_t> pre, std::vector<std::size_t> cyc,
                       std::vector<long> ts, const IntMat2& m = scalar(2)) {
  std::vector<Int> t;
  for (long v : ts) t.emplace_back(v);
  return WordSystem{TWord::make(std::move(pre), std::move(cyc), std::move(t)),
                    EventuallyPeriodic<IntMat2>::constant(m)};
}

inline std::vector<RatVec2> residues(long n, long scale = 1) {
  std::vector<RatVec2> out;
  ResidueSet f(n);
  for (const auto& p : f.elements()) {
    out.push_back(Rat(scale) * to_rational(p));
  }
  return out;
}

}  // namespace fx
