#pragma once

// Candidate spectra for Moran measures: the Hadamard tower
//   Lambda_k = { sum_{j<=k} A_j l_j : l_j in L_j },  A_j = M_1* ... M_{j-1}*,
// which is always orthogonal but need not be complete, and the lattice
// spectrum of the det-4 family. Orthogonality is certified exactly; the
// completeness sum Q(xi) = sum |mu^(xi + lambda)|^2 is numeric.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moranspec/classify.hpp"
#include "moranspec/digitsets.hpp"
#include "moranspec/error.hpp"
#include "moranspec/lattice.hpp"
#include "moranspec/mask.hpp"
#include "moranspec/moran.hpp"
#include "moranspec/unity.hpp"

namespace moranspec {

enum class SpectrumKind {
  orthogonal_candidate,  // tower: orthogonal, completeness not claimed
  certified_spectrum,    // lattice spectrum backed by a classification
};

inline std::string to_string(SpectrumKind k) {
  return k == SpectrumKind::orthogonal_candidate ? "orthogonal candidate"
                                                 : "certified spectrum";
}

// ------------------------------------------------------------------ tower

class SpectrumTower {
 public:
  [[nodiscard]] const MoranSystem& system() const noexcept { return sys_; }
  [[nodiscard]] static constexpr SpectrumKind kind() noexcept {
    return SpectrumKind::orthogonal_candidate;
  }

  // L_j = (1/2) M_j* F_2; integral for j >= 2.
  [[nodiscard]] const std::vector<RatVec2>& companions(std::size_t j) const {
    if (j == 0) throw error(errc::invalid_argument, "levels start at 1");
    return companions_[index(j)];
  }

  // A_j = M_1* ... M_{j-1}*, A_1 = I.
  [[nodiscard]] IntMat2 product(std::size_t j) const {
    if (j == 0) throw error(errc::invalid_argument, "levels start at 1");
    IntMat2 a = IntMat2::identity();
    for (std::size_t i = 1; i < j; ++i) a = a * transpose(sys_.matrix(i));
    return a;
  }

 private:
  friend SpectrumTower build_tower(const MoranSystem& sys);

  explicit SpectrumTower(MoranSystem sys) : sys_(std::move(sys)) {}

  [[nodiscard]] std::size_t index(std::size_t n) const {
    const std::size_t pre = sys_.preperiod().size();
    if (n <= pre) return n - 1;
    return pre + (n - 1 - pre) % sys_.period().size();
  }

  MoranSystem sys_;
  std::vector<std::vector<RatVec2>> companions_;  // positions 1..span
};

inline std::vector<RatVec2> half_adjoint_residues(const IntMat2& m) {
  const RatMat2 half_adj = Rat(1, 2) * to_rational(transpose(m));
  std::vector<RatVec2> out;
  const ResidueSet f2(2);
  for (const auto& f : f2.elements()) {
    out.push_back(half_adj * to_rational(f));
  }
  return out;
}

inline SpectrumTower build_tower(const MoranSystem& sys) {
  if (!sys.all_structured()) {
    throw error(errc::invalid_argument, "tower needs structured digit sets");
  }
  for (std::size_t j = 2; j <= sys.span() + 1; ++j) {
    if (!in_gl2_2z(sys.matrix(j))) {
      throw error(errc::tower_unavailable,
                  "M_" + std::to_string(j) + " = " + to_string(sys.matrix(j)) +
                      " is not in GL(2,2Z)",
                  j);
    }
  }
  SpectrumTower t(sys);
  for (std::size_t j = 1; j <= sys.span(); ++j) {
    auto l = half_adjoint_residues(sys.matrix(j));
    if (!is_hadamard_triple(sys.matrix(j), sys.digits(j),
                            std::span<const RatVec2>(l))) {
      throw error(errc::tower_unavailable,
                  "level " + std::to_string(j) + " is not a Hadamard triple",
                  j);
    }
    t.companions_.push_back(std::move(l));
  }
  return t;
}

// Lambda_k with the level-1 choice varying fastest.
inline std::vector<RatVec2> enumerate_tower(const SpectrumTower& tower,
                                            std::size_t k,
                                            std::size_t cap = kDefaultPointCap) {
  std::size_t total = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    total *= tower.companions(j).size();
    if (total > cap) {
      throw error(errc::cap_exceeded,
                  "tower depth " + std::to_string(k) + " exceeds point cap " +
                      std::to_string(cap));
    }
  }
  std::vector<RatVec2> pts{RatVec2{Rat(0), Rat(0)}};
  for (std::size_t j = 1; j <= k; ++j) {
    const RatMat2 a = to_rational(tower.product(j));
    std::vector<RatVec2> next;
    next.reserve(pts.size() * 4);
    for (const auto& l : tower.companions(j)) {
      const RatVec2 shift = a * l;
      for (const auto& p : pts) next.push_back(p + shift);
    }
    pts = std::move(next);
  }
  std::set<RatVec2> seen(pts.begin(), pts.end());
  if (seen.size() != pts.size()) {
    throw error(errc::duplicate_digits,
                "tower truncation produced repeated points");
  }
  return pts;
}

// -------------------------------------------------------- lattice spectrum

// Lambda = offsets + basis Z^2. For (M_1, t_1 D), (M_2, t_2 D), ... with
// t_2 | t_1 this is (1/t_2)((1/2) M_1* F_2 + M_1* Z^2), moved back from the
// scaled frame P by P^{-t}.
class LatticeSpectrum {
 public:
  LatticeSpectrum(std::vector<RatVec2> offsets, RatMat2 basis)
      : offsets_(std::move(offsets)), basis_(std::move(basis)) {
    if (det(basis_) == 0) {
      throw error(errc::singular_matrix, "lattice basis is singular");
    }
  }

  [[nodiscard]] static constexpr SpectrumKind kind() noexcept {
    return SpectrumKind::certified_spectrum;
  }
  [[nodiscard]] const std::vector<RatVec2>& offsets() const noexcept {
    return offsets_;
  }
  [[nodiscard]] const RatMat2& basis() const noexcept { return basis_; }

  // Lambda intersected with [-box, box]^2, sorted lexicographically.
  [[nodiscard]] std::vector<RatVec2> enumerate(const Rat& box) const {
    if (box < 0) throw error(errc::invalid_argument, "box must be >= 0");
    const RatMat2 inv = inverse(basis_);
    Rat off = 0;
    for (const auto& o : offsets_) off = std::max({off, Rat(abs(o.x)), Rat(abs(o.y))});
    const Rat row = std::max(Rat(abs(inv.a11) + abs(inv.a12)),
                             Rat(abs(inv.a21) + abs(inv.a22)));
    const Rat reach = row * (box + off);
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), reach.get_num_mpz_t(), reach.get_den_mpz_t());
    r += 1;
    std::set<RatVec2> pts;
    for (Int k1 = -r; k1 <= r; ++k1) {
      for (Int k2 = -r; k2 <= r; ++k2) {
        const RatVec2 base = basis_ * RatVec2{Rat(k1), Rat(k2)};
        for (const auto& o : offsets_) {
          const RatVec2 p = base + o;
          if (abs(p.x) <= box && abs(p.y) <= box) pts.insert(p);
        }
      }
    }
    return {pts.begin(), pts.end()};
  }

 private:
  std::vector<RatVec2> offsets_;
  RatMat2 basis_;
};

inline LatticeSpectrum build_lattice_spectrum(const MoranSystem& sys) {
  const Verdict v = classify_thm16(sys);
  if (v.outcome != Outcome::spectral) {
    throw error(errc::out_of_theory,
                "lattice spectrum needs a T1.6 Spectral verdict: " + v.detail());
  }
  for (std::size_t n = 2; n <= sys.span() + 1; ++n) {
    if (!in_gl2_2z(sys.matrix(n)) || abs(det(sys.matrix(n))) != 4) {
      throw error(errc::out_of_theory,
                  "M_" + std::to_string(n) + " is not a det-4 GL(2,2Z) matrix",
                  n);
    }
  }
  const Thm16Shape s = *thm16_shape(sys);
  const RatMat2 back = inverse(transpose(s.frame));
  const RatMat2 adj = to_rational(transpose(s.m1));
  const Rat inv_t2 = make_rat(Int(1), s.t2);
  std::vector<RatVec2> offsets;
  for (const auto& l : half_adjoint_residues(s.m1)) {
    offsets.push_back(inv_t2 * (back * l));
  }
  return LatticeSpectrum(std::move(offsets), inv_t2 * (back * adj));
}

// Q^{-t} Lambda: the image of a spectrum under conjugation by Q.
inline std::vector<RatVec2> transform_spectrum(const IntMat2& q,
                                               std::span<const RatVec2> pts) {
  const RatMat2 back = inverse(transpose(q));
  std::vector<RatVec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(back * p);
  return out;
}

// ------------------------------------------------------------ orthogonality

struct OrthogonalityResult {
  bool orthogonal = true;
  std::optional<std::pair<std::size_t, std::size_t>> failing;  // indices
  std::size_t pairs_checked = 0;
};

// Every difference lambda_i - lambda_j (i < j) must carry a zero certificate.
inline OrthogonalityResult verify_orthogonality(const MoranSystem& sys,
                                                std::span<const RatVec2> pts) {
  const ZeroScanner scanner(sys);
  OrthogonalityResult r;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ++r.pairs_checked;
      if (!scanner.scan(pts[i] - pts[j])) {
        r.orthogonal = false;
        r.failing = std::pair{i, j};
        return r;
      }
    }
  }
  return r;
}

// ------------------------------------------------------------ completeness

// sum_{lambda} |mu^(xi + lambda)|^2 in the order given, each term to
// eps / #Lambda.
inline double completeness_sum(const FourierEvaluator& ev,
                               std::span<const RatVec2> pts, const Vec2d& xi,
                               double eps) {
  if (!(eps > 0)) {
    throw error(errc::nonpositive_tolerance, "eps must be positive");
  }
  if (pts.empty()) return 0.0;
  const double per = eps / static_cast<double>(pts.size());
  double total = 0.0;
  for (const auto& l : pts) {
    total += std::norm(ev(xi + to_double(l), per).value);
  }
  return total;
}

inline double completeness_sum(const MoranSystem& sys,
                               std::span<const RatVec2> pts, const Vec2d& xi,
                               double eps) {
  return completeness_sum(FourierEvaluator(sys), pts, xi, eps);
}

struct CompletenessReport {
  std::vector<Vec2d> samples;
  std::vector<std::size_t> sizes;           // #Lambda per truncation
  std::vector<std::vector<double>> values;  // values[sample][truncation]
  double eps = 0;
  bool monotone = true;  // nondecreasing along the truncations, up to 2 eps
  double max_value = 0;
};

// Q along nested truncations Lambda^(1) c Lambda^(2) c ... at each sample.
inline CompletenessReport completeness_report(
    const MoranSystem& sys, const std::vector<std::vector<RatVec2>>& nested,
    std::span<const Vec2d> samples, double eps) {
  const FourierEvaluator ev(sys);
  CompletenessReport r;
  r.samples.assign(samples.begin(), samples.end());
  r.eps = eps;
  for (const auto& t : nested) r.sizes.push_back(t.size());
  for (const auto& xi : samples) {
    std::vector<double> row;
    for (const auto& t : nested) {
      row.push_back(completeness_sum(ev, t, xi, eps));
      r.max_value = std::max(r.max_value, row.back());
      if (row.size() > 1 && row.back() < row[row.size() - 2] - 2 * eps) {
        r.monotone = false;
      }
    }
    r.values.push_back(std::move(row));
  }
  return r;
}

// ---------------------------------------------------------- discrete oracle

inline constexpr std::size_t kDefaultOracleCap = 4;

struct OracleResult {
  bool spectral = false;        // exact unitarity and residual < 1e-10
  bool exact_unitary = false;   // every off-diagonal entry vanishes exactly
  double residual = 0;          // max |H* H - I| in floating point
  std::size_t atoms = 0;
  std::optional<std::pair<std::size_t, std::size_t>> failing;
};

// Atoms of mu_n = delta_{M_1^{-1} D_1} * ... * delta_{M_1^{-1}...M_n^{-1} D_n}
// with multiplicity.
inline std::vector<RatVec2> level_atoms(const MoranSystem& sys, std::size_t n) {
  std::vector<RatVec2> atoms{RatVec2{Rat(0), Rat(0)}};
  RatMat2 c = RatMat2::identity();
  for (std::size_t j = 1; j <= n; ++j) {
    c = c * inverse(sys.matrix(j));
    std::vector<RatVec2> next;
    for (const auto& a : atoms) {
      for (const auto& d : elements(sys.digits(j))) {
        next.push_back(a + c * to_rational(d));
      }
    }
    atoms = std::move(next);
  }
  return atoms;
}

// (mu_n, Lambda) is a spectral pair iff the normalised exponential matrix
// (1/sqrt N)(exp(2 pi i <a, lambda>)) is unitary.
inline OracleResult discrete_spectrum_oracle(
    const MoranSystem& sys, std::size_t n, std::span<const RatVec2> pts,
    std::size_t cap = kDefaultOracleCap) {
  if (n == 0) throw error(errc::invalid_argument, "oracle level must be >= 1");
  if (n > cap) {
    throw error(errc::cap_exceeded, "oracle level " + std::to_string(n) +
                                        " exceeds cap " + std::to_string(cap));
  }
  const auto atoms = level_atoms(sys, n);
  if (atoms.size() != pts.size()) {
    throw error(errc::cardinality_mismatch,
                std::to_string(atoms.size()) + " atoms but " +
                    std::to_string(pts.size()) + " exponentials");
  }
  OracleResult r;
  r.atoms = atoms.size();
  r.exact_unitary = true;
  for (std::size_t i = 0; i < pts.size() && r.exact_unitary; ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const RatVec2 diff = pts[j] - pts[i];
      UnityRootSum s;
      for (const auto& a : atoms) s.add(dot(a, diff));
      if (!unity_sum_is_zero(s)) {
        r.exact_unitary = false;
        r.failing = std::pair{i, j};
        break;
      }
    }
  }
  std::vector<Vec2d> fa, fl;
  for (const auto& a : atoms) fa.push_back(to_double(a));
  for (const auto& l : pts) fl.push_back(to_double(l));
  const double inv_n = 1.0 / static_cast<double>(atoms.size());
  for (std::size_t i = 0; i < fl.size(); ++i) {
    for (std::size_t j = i + 1; j < fl.size(); ++j) {
      const Vec2d diff = fl[j] - fl[i];
      std::complex<double> acc = 0.0;
      for (const auto& a : fa) {
        acc += std::polar(1.0, 2.0 * std::numbers::pi *
                                   (a.x * diff.x + a.y * diff.y));
      }
      r.residual = std::max(r.residual, std::abs(acc) * inv_n);
    }
  }
  r.spectral = r.exact_unitary && r.residual < 1e-10;
  return r;
}

}  // namespace moranspec
