#pragma once

// Digit sets: the structured four-point family {0, a, b, -a-b} with odd
// det[a b], the canonical set D = {0, e1, e2, -e1-e2}, and arbitrary finite
// integer sets such as D + 6D.

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moranspec/error.hpp"
#include "moranspec/lattice.hpp"

namespace moranspec {

class StructuredDigitSet {
 public:
  // Fails with oddity_violation when det[alpha beta] is even and nonzero,
  // and with degenerate when it is zero.
  static StructuredDigitSet make(IntVec2 alpha, IntVec2 beta) {
    const Int p = alpha.x * beta.y - alpha.y * beta.x;
    if (p == 0) {
      throw error(errc::degenerate, "alpha and beta are collinear");
    }
    if (mpz_even_p(p.get_mpz_t())) {
      throw error(errc::oddity_violation, "det[alpha beta] = " + p.get_str() +
                                              " is even");
    }
    return StructuredDigitSet(std::move(alpha), std::move(beta));
  }

  [[nodiscard]] const IntVec2& alpha() const noexcept { return alpha_; }
  [[nodiscard]] const IntVec2& beta() const noexcept { return beta_; }

  // Q = [alpha beta] as columns; D = Q * canonical.
  [[nodiscard]] IntMat2 q_matrix() const {
    return {alpha_.x, beta_.x, alpha_.y, beta_.y};
  }
  [[nodiscard]] Int p() const { return det(q_matrix()); }

  // {0, alpha, beta, -alpha-beta}, in that order.
  [[nodiscard]] std::vector<IntVec2> elements() const {
    return {IntVec2{Int(0), Int(0)}, alpha_, beta_, -(alpha_ + beta_)};
  }

  // t when this is t * canonical.
  [[nodiscard]] std::optional<Int> scale() const {
    if (alpha_.y == 0 && beta_.x == 0 && alpha_.x == beta_.y) return alpha_.x;
    return std::nullopt;
  }

  friend bool operator==(const StructuredDigitSet& a,
                         const StructuredDigitSet& b) {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_;
  }

 private:
  StructuredDigitSet(IntVec2 alpha, IntVec2 beta)
      : alpha_(std::move(alpha)), beta_(std::move(beta)) {}

  IntVec2 alpha_;
  IntVec2 beta_;
};

class GenericDigitSet {
 public:
  static GenericDigitSet make(std::vector<IntVec2> elements) {
    if (elements.empty()) {
      throw error(errc::invalid_argument, "digit set must be nonempty");
    }
    std::set<IntVec2> seen;
    for (const auto& d : elements) {
      if (!seen.insert(d).second) {
        throw error(errc::duplicate_digits,
                    "digit " + to_string(d) + " appears more than once");
      }
    }
    return GenericDigitSet(std::move(elements));
  }

  [[nodiscard]] const std::vector<IntVec2>& elements() const noexcept {
    return elements_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return elements_.size(); }

  friend bool operator==(const GenericDigitSet& a, const GenericDigitSet& b) {
    return a.elements_ == b.elements_;
  }

 private:
  explicit GenericDigitSet(std::vector<IntVec2> elements)
      : elements_(std::move(elements)) {}

  std::vector<IntVec2> elements_;
};

using DigitSet = std::variant<StructuredDigitSet, GenericDigitSet>;

inline StructuredDigitSet validate_structured(IntVec2 alpha, IntVec2 beta) {
  return StructuredDigitSet::make(std::move(alpha), std::move(beta));
}

inline StructuredDigitSet canonical_D() {
  return StructuredDigitSet::make({Int(1), Int(0)}, {Int(0), Int(1)});
}

inline StructuredDigitSet scaled_canonical(const Int& t) {
  if (t == 0 || mpz_even_p(t.get_mpz_t())) {
    throw error(errc::oddity_violation,
                "scale t = " + t.get_str() + " must be odd");
  }
  return StructuredDigitSet::make({t, Int(0)}, {Int(0), t});
}

inline std::vector<IntVec2> elements(const DigitSet& d) {
  return std::visit([](const auto& s) { return s.elements(); }, d);
}
inline std::size_t cardinality(const DigitSet& d) {
  return std::holds_alternative<StructuredDigitSet>(d)
             ? 4
             : std::get<GenericDigitSet>(d).size();
}

inline GenericDigitSet as_generic(const DigitSet& d) {
  return GenericDigitSet::make(elements(d));
}
inline GenericDigitSet as_generic(const StructuredDigitSet& d) {
  return GenericDigitSet::make(d.elements());
}

// max ||d||_2^2 over the set.
inline Int max_norm_squared(std::span<const IntVec2> digits) {
  Int best = 0;
  for (const auto& d : digits) best = std::max(best, Int(norm2_squared(d)));
  return best;
}
inline Int max_norm_squared(const DigitSet& d) {
  const auto pts = elements(d);
  return max_norm_squared(pts);
}

// {d1 + d2}; rejects collisions, since merged atoms would change the
// uniform weights.
inline GenericDigitSet sum_set(const GenericDigitSet& a,
                               const GenericDigitSet& b) {
  std::vector<IntVec2> out;
  out.reserve(a.size() * b.size());
  std::set<IntVec2> seen;
  for (const auto& u : a.elements()) {
    for (const auto& v : b.elements()) {
      IntVec2 s = u + v;
      if (!seen.insert(s).second) {
        throw error(errc::duplicate_digits,
                    "sum " + to_string(s) + " arises more than once");
      }
      out.push_back(std::move(s));
    }
  }
  return GenericDigitSet::make(std::move(out));
}

// k * D for any nonzero integer k (kept generic; k may be even).
inline GenericDigitSet dilate(const Int& k, const DigitSet& d) {
  if (k == 0) throw error(errc::degenerate, "dilation by zero");
  std::vector<IntVec2> out;
  for (const auto& v : elements(d)) out.push_back(k * v);
  return GenericDigitSet::make(std::move(out));
}

// Q D. Structured sets stay structured when det Q is odd.
inline DigitSet transformed(const IntMat2& q, const DigitSet& d) {
  if (det(q) == 0) throw error(errc::singular_matrix, "transform is singular");
  if (const auto* s = std::get_if<StructuredDigitSet>(&d)) {
    const Int dq = det(q);
    if (mpz_odd_p(dq.get_mpz_t())) {
      return StructuredDigitSet::make(q * s->alpha(), q * s->beta());
    }
  }
  std::vector<IntVec2> out;
  for (const auto& v : elements(d)) out.push_back(q * v);
  return GenericDigitSet::make(std::move(out));
}

inline std::string describe(const DigitSet& d) {
  if (const auto* s = std::get_if<StructuredDigitSet>(&d)) {
    if (auto t = s->scale()) return t->get_str() + "D";
    return "structured(alpha=" + to_string(s->alpha()) +
           ",beta=" + to_string(s->beta()) + ")";
  }
  std::string out = "{";
  const auto& pts = std::get<GenericDigitSet>(d).elements();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ",";
    out += to_string(pts[i]);
  }
  return out + "}";
}

}  // namespace moranspec
