#pragma once

// Exact 2x2 integer/rational linear algebra on the plane lattice.
//
// Integers are GMP `mpz_class`, rationals are `mpq_class` kept in canonical
// lowest terms. Every decision (expanding, GL(2,2Z), inverse norm < 1) is an
// exact algebraic test; floating point only appears in the explicit
// `to_double` conversions.

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "moranspec/error.hpp"

namespace moranspec {

using Int = mpz_class;
using Rat = mpq_class;

template <class T>
struct Vec2 {
  T x{};
  T y{};

  friend bool operator==(const Vec2& a, const Vec2& b) {
    return a.x == b.x && a.y == b.y;
  }
  // Lexicographic, so vectors can key ordered containers.
  friend bool operator<(const Vec2& a, const Vec2& b) {
    if (a.x < b.x) return true;
    if (b.x < a.x) return false;
    return a.y < b.y;
  }
};

// Row-major: [[a11, a12], [a21, a22]].
template <class T>
struct Mat2 {
  T a11{}, a12{}, a21{}, a22{};

  static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }
  static Mat2 scalar(const T& s) { return {s, T(0), T(0), s}; }

  friend bool operator==(const Mat2& a, const Mat2& b) {
    return a.a11 == b.a11 && a.a12 == b.a12 && a.a21 == b.a21 &&
           a.a22 == b.a22;
  }
};

using IntVec2 = Vec2<Int>;
using RatVec2 = Vec2<Rat>;
using IntMat2 = Mat2<Int>;
using RatMat2 = Mat2<Rat>;
using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;

// ---------------------------------------------------------------- arithmetic

template <class T>
Vec2<T> operator+(const Vec2<T>& a, const Vec2<T>& b) {
  return {T(a.x + b.x), T(a.y + b.y)};
}
template <class T>
Vec2<T> operator-(const Vec2<T>& a, const Vec2<T>& b) {
  return {T(a.x - b.x), T(a.y - b.y)};
}
template <class T>
Vec2<T> operator-(const Vec2<T>& a) {
  return {T(-a.x), T(-a.y)};
}
template <class T>
Vec2<T> operator*(const T& s, const Vec2<T>& v) {
  return {T(s * v.x), T(s * v.y)};
}

template <class T>
Mat2<T> operator*(const Mat2<T>& a, const Mat2<T>& b) {
  return {T(a.a11 * b.a11 + a.a12 * b.a21), T(a.a11 * b.a12 + a.a12 * b.a22),
          T(a.a21 * b.a11 + a.a22 * b.a21), T(a.a21 * b.a12 + a.a22 * b.a22)};
}
template <class T>
Mat2<T> operator*(const T& s, const Mat2<T>& m) {
  return {T(s * m.a11), T(s * m.a12), T(s * m.a21), T(s * m.a22)};
}
template <class T>
Vec2<T> operator*(const Mat2<T>& m, const Vec2<T>& v) {
  return {T(m.a11 * v.x + m.a12 * v.y), T(m.a21 * v.x + m.a22 * v.y)};
}

template <class T>
T det(const Mat2<T>& m) {
  return T(m.a11 * m.a22 - m.a12 * m.a21);
}
template <class T>
T trace(const Mat2<T>& m) {
  return T(m.a11 + m.a22);
}
template <class T>
T dot(const Vec2<T>& a, const Vec2<T>& b) {
  return T(a.x * b.x + a.y * b.y);
}
template <class T>
T norm2_squared(const Vec2<T>& v) {
  return dot(v, v);
}
// Squared Frobenius norm; an upper bound for the squared operator norm.
template <class T>
T frobenius_squared(const Mat2<T>& m) {
  return T(m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22);
}

// The adjoint M* of a real matrix is its transpose.
template <class T>
Mat2<T> transpose(const Mat2<T>& m) {
  return {m.a11, m.a21, m.a12, m.a22};
}

// Left-to-right exact product of a nonempty list.
inline IntMat2 mat_product(std::span<const IntMat2> factors) {
  if (factors.empty()) {
    throw error(errc::invalid_argument, "mat_product of an empty list");
  }
  IntMat2 acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = acc * factors[i];
  return acc;
}

// ---------------------------------------------------------------- conversion

inline RatVec2 to_rational(const IntVec2& v) { return {Rat(v.x), Rat(v.y)}; }
inline RatMat2 to_rational(const IntMat2& m) {
  return {Rat(m.a11), Rat(m.a12), Rat(m.a21), Rat(m.a22)};
}

// num/den in lowest terms (the two-argument mpq_class constructor does not
// canonicalize).
inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw error(errc::invalid_argument, "zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_integral(const Rat& q) { return q.get_den() == 1; }
inline bool is_integral(const RatVec2& v) {
  return is_integral(v.x) && is_integral(v.y);
}
inline bool is_integral(const RatMat2& m) {
  return is_integral(m.a11) && is_integral(m.a12) && is_integral(m.a21) &&
         is_integral(m.a22);
}

inline IntVec2 to_integer(const RatVec2& v) {
  if (!is_integral(v)) {
    throw error(errc::invalid_argument, "vector is not integral");
  }
  return {v.x.get_num(), v.y.get_num()};
}
inline IntMat2 to_integer(const RatMat2& m) {
  if (!is_integral(m)) {
    throw error(errc::invalid_argument, "matrix is not integral");
  }
  return {m.a11.get_num(), m.a12.get_num(), m.a21.get_num(), m.a22.get_num()};
}

inline double to_double(const Int& v) { return v.get_d(); }
inline double to_double(const Rat& v) { return v.get_d(); }
template <class T>
Vec2d to_double(const Vec2<T>& v) {
  return {to_double(v.x), to_double(v.y)};
}
template <class T>
Mat2d to_double(const Mat2<T>& m) {
  return {to_double(m.a11), to_double(m.a12), to_double(m.a21),
          to_double(m.a22)};
}

// Every finite double is a dyadic rational; this conversion is exact.
inline RatVec2 exact_rational(const Vec2d& v) { return {Rat(v.x), Rat(v.y)}; }

inline RatMat2 inverse(const RatMat2& m) {
  const Rat d = det(m);
  if (d == 0) throw error(errc::singular_matrix, "matrix is singular");
  return {Rat(m.a22 / d), Rat(-m.a12 / d), Rat(-m.a21 / d), Rat(m.a11 / d)};
}
inline RatMat2 inverse(const IntMat2& m) { return inverse(to_rational(m)); }

inline Mat2d inverse(const Mat2d& m) {
  const double d = det(m);
  return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

// ------------------------------------------------------------- exact tests

// All eigenvalues of modulus > 1, decided on p(x) = x^2 - t x + d.
inline bool is_expanding(const IntMat2& m) {
  const Int t = trace(m);
  const Int d = det(m);
  if (t * t < 4 * d) return d > 1;  // complex pair of modulus sqrt(d)
  const Int p1 = 1 - t + d;
  const Int pm1 = 1 + t + d;
  if (abs(d) <= 1) return false;
  if (p1 * pm1 <= 0) return false;
  return !(p1 > 0 && pm1 > 0 && abs(t) <= 2);
}

inline bool in_gl2_2z(const IntMat2& m) {
  auto even = [](const Int& v) { return mpz_even_p(v.get_mpz_t()) != 0; };
  return even(m.a11) && even(m.a12) && even(m.a21) && even(m.a22) &&
         det(m) != 0;
}

// ||M^{-1}|| < 1, i.e. both eigenvalues of M^t M exceed 1. With
// s = tr(M^t M) and q(x) = x^2 - s x + det(M)^2, that is q(1) > 0 and s > 2.
inline bool inverse_norm_below_one(const IntMat2& m) {
  const Int s = trace(transpose(m) * m);
  const Int d = det(m);
  const Int q1 = 1 - s + d * d;
  return q1 > 0 && s > 2;
}

inline bool is_unimodular(const IntMat2& m) { return abs(det(m)) == 1; }

// Operator 2-norm of M^{-1}, i.e. 1 / sigma_min(M). Numeric; reporting and
// truncation bounds only.
inline double inverse_operator_norm(const Mat2d& m) {
  const long double s = static_cast<long double>(m.a11) * m.a11 +
                        static_cast<long double>(m.a12) * m.a12 +
                        static_cast<long double>(m.a21) * m.a21 +
                        static_cast<long double>(m.a22) * m.a22;
  const long double d = static_cast<long double>(m.a11) * m.a22 -
                        static_cast<long double>(m.a12) * m.a21;
  long double disc = s * s - 4 * d * d;
  if (disc < 0) disc = 0;
  const long double sigma_min_sq = 2 * d * d / (s + std::sqrt(disc));
  return static_cast<double>(1.0L / std::sqrt(sigma_min_sq));
}
template <class T>
double inverse_operator_norm(const Mat2<T>& m) {
  return inverse_operator_norm(to_double(m));
}

inline double operator_norm(const Mat2d& m) {
  const double s = frobenius_squared(m);
  const double d = det(m);
  const double disc = std::max(0.0, s * s - 4 * d * d);
  return std::sqrt((s + std::sqrt(disc)) / 2);
}

// ------------------------------------------------------------ residue sets

// F_n = {(l1, l2) : 0 <= l_i < n}, enumerated with l1 varying fastest.
class ResidueSet {
 public:
  explicit ResidueSet(long n) : n_(n) {
    if (n < 2) {
      throw error(errc::invalid_argument, "residue set needs n >= 2");
    }
    elements_.reserve(static_cast<std::size_t>(n * n));
    for (long l2 = 0; l2 < n; ++l2)
      for (long l1 = 0; l1 < n; ++l1) elements_.push_back({Int(l1), Int(l2)});
  }

  [[nodiscard]] long n() const noexcept { return n_; }
  [[nodiscard]] const std::vector<IntVec2>& elements() const noexcept {
    return elements_;
  }
  // F_n without the origin.
  [[nodiscard]] std::vector<IntVec2> nonzero() const {
    return {elements_.begin() + 1, elements_.end()};
  }
  [[nodiscard]] std::size_t size() const noexcept { return elements_.size(); }

 private:
  long n_;
  std::vector<IntVec2> elements_;
};

inline ResidueSet residue_set(long n) { return ResidueSet(n); }

// ----------------------------------------------------------------- printing

inline std::string to_string(const Int& v) { return v.get_str(); }
inline std::string to_string(const Rat& v) { return v.get_str(); }
inline std::string to_string(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
std::string to_string(const Vec2<T>& v) {
  return "(" + to_string(v.x) + "," + to_string(v.y) + ")";
}
template <class T>
std::string to_string(const Mat2<T>& m) {
  return "[[" + to_string(m.a11) + "," + to_string(m.a12) + "],[" +
         to_string(m.a21) + "," + to_string(m.a22) + "]]";
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Vec2<T>& v) {
  return os << to_string(v);
}
template <class T>
std::ostream& operator<<(std::ostream& os, const Mat2<T>& m) {
  return os << to_string(m);
}

}  // namespace moranspec
