#pragma once

// Moran systems {(M_n, D_n)} given in eventually periodic form, together with
// existence validation, the canonical reduction D_n = Q_n D, the Fourier
// product with a certified truncation bound, and exact zero certificates.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moranspec/digitsets.hpp"
#include "moranspec/error.hpp"
#include "moranspec/lattice.hpp"
#include "moranspec/mask.hpp"
#include "moranspec/sequence.hpp"

namespace moranspec {

struct Level {
  IntMat2 matrix;
  DigitSet digits;

  friend bool operator==(const Level& a, const Level& b) {
    return a.matrix == b.matrix && a.digits == b.digits;
  }
};

class MoranSystem {
 public:
  MoranSystem(std::vector<Level> preperiod, std::vector<Level> period)
      : levels_(std::move(preperiod), std::move(period)) {
    check_nonsingular();
  }
  explicit MoranSystem(EventuallyPeriodic<Level> levels)
      : levels_(std::move(levels)) {
    check_nonsingular();
  }

  static MoranSystem constant(IntMat2 m, DigitSet d) {
    return MoranSystem({}, {Level{std::move(m), std::move(d)}});
  }

  // (M_n, D_n), n >= 1.
  [[nodiscard]] const Level& level(std::size_t n) const { return levels_.at(n); }
  [[nodiscard]] const IntMat2& matrix(std::size_t n) const {
    return level(n).matrix;
  }
  [[nodiscard]] const DigitSet& digits(std::size_t n) const {
    return level(n).digits;
  }
  [[nodiscard]] const EventuallyPeriodic<Level>& levels() const noexcept {
    return levels_;
  }
  [[nodiscard]] const std::vector<Level>& preperiod() const noexcept {
    return levels_.prefix();
  }
  [[nodiscard]] const std::vector<Level>& period() const noexcept {
    return levels_.cycle();
  }
  // Levels 1..span() realise every level value.
  [[nodiscard]] std::size_t span() const noexcept { return levels_.span(); }

  [[nodiscard]] bool all_structured() const {
    for (std::size_t n = 1; n <= span(); ++n) {
      if (!std::holds_alternative<StructuredDigitSet>(digits(n))) return false;
    }
    return true;
  }

  [[nodiscard]] MoranSystem normalized() const {
    return MoranSystem(levels_.normalized());
  }

  // (Q M_n Q^{-1}, Q D_n) for unimodular Q.
  [[nodiscard]] MoranSystem conjugated(const IntMat2& q) const {
    if (!is_unimodular(q)) {
      throw error(errc::invalid_argument, "conjugation needs unimodular Q");
    }
    const RatMat2 qr = to_rational(q);
    const RatMat2 qinv = inverse(q);
    return MoranSystem(levels_.map([&](const Level& l) {
      return Level{to_integer(qr * to_rational(l.matrix) * qinv),
                   transformed(q, l.digits)};
    }));
  }

  friend bool operator==(const MoranSystem& a, const MoranSystem& b) {
    return a.levels_ == b.levels_;
  }

 private:
  void check_nonsingular() const {
    for (std::size_t n = 1; n <= levels_.span(); ++n) {
      if (det(levels_.at(n).matrix) == 0) {
        throw error(errc::singular_matrix, "M_n is singular", n);
      }
    }
  }

  EventuallyPeriodic<Level> levels_;
};

// ------------------------------------------------------------- validation

struct ValidationReport {
  double iota = 0;             // sup_n ||M_n^{-1}||
  double gamma = 0;            // max_n max_{d in D_n} ||d||_2
  double existence_bound = 0;  // gamma iota / (1 - iota): radius of spt(mu)
  std::vector<double> level_inverse_norms;  // levels 1..span()
};

// Every level must be expanding with ||M_n^{-1}|| < 1 (exact tests).
inline ValidationReport validate(const MoranSystem& sys) {
  ValidationReport r;
  Int gamma_sq = 0;
  for (std::size_t n = 1; n <= sys.span(); ++n) {
    const IntMat2& m = sys.matrix(n);
    if (!is_expanding(m)) {
      throw error(errc::not_expanding,
                  "M_" + std::to_string(n) + " = " + to_string(m) +
                      " is not expanding",
                  n);
    }
    if (!inverse_norm_below_one(m)) {
      throw error(errc::norm_at_least_one,
                  "||M_" + std::to_string(n) + "^{-1}|| >= 1 for " +
                      to_string(m),
                  n);
    }
    const double inv = inverse_operator_norm(m);
    r.level_inverse_norms.push_back(inv);
    r.iota = std::max(r.iota, inv);
    gamma_sq = std::max(gamma_sq, max_norm_squared(sys.digits(n)));
  }
  r.gamma = std::sqrt(gamma_sq.get_d());
  r.existence_bound = r.gamma * r.iota / (1.0 - r.iota);
  return r;
}

// --------------------------------------------------------- reduced system

// M~_n = Q_n^{-1} M_n Q_{n-1} with Q_0 = I; every digit set becomes the
// canonical one. `contraction` and `conditioning` carry the data needed to
// certify truncation of the reduced product: with eta~_j = Q_j^t eta_j,
// ||eta~_k|| <= conditioning * contraction^{k-j} ||eta~_j||.
struct ReducedSystem {
  EventuallyPeriodic<RatMat2> matrices;
  double contraction = 0;
  double conditioning = 1;
};

inline ReducedSystem reduce_canonical(const MoranSystem& sys) {
  if (!sys.all_structured()) {
    throw error(errc::invalid_argument,
                "canonical reduction needs structured digit sets");
  }
  const ValidationReport v = validate(sys);
  auto q_at = [&](std::size_t n) -> RatMat2 {
    if (n == 0) return RatMat2::identity();
    return to_rational(std::get<StructuredDigitSet>(sys.digits(n)).q_matrix());
  };
  const std::size_t pre = sys.preperiod().size() + 1;
  const std::size_t per = sys.period().size();
  std::vector<RatMat2> prefix, cycle;
  double max_q = 1.0, max_qinv = 1.0;
  for (std::size_t n = 1; n <= pre + per; ++n) {
    const RatMat2 qn = q_at(n);
    RatMat2 reduced = inverse(qn) * to_rational(sys.matrix(n)) * q_at(n - 1);
    (n <= pre ? prefix : cycle).push_back(std::move(reduced));
    max_q = std::max(max_q, operator_norm(to_double(qn)));
    max_qinv = std::max(max_qinv, inverse_operator_norm(qn));
  }
  ReducedSystem out{EventuallyPeriodic<RatMat2>(std::move(prefix),
                                                std::move(cycle)),
                    v.iota, max_q * max_qinv};
  return out;
}

// ------------------------------------------------------- zero certificates

// xi = M_1* ... M_j* eta with eta in Z(m_{D_j}).
struct ZeroCertificate {
  std::size_t level = 0;
  RatVec2 witness;
};

// Exact scan over eta_j = (M_1* ... M_j*)^{-1} xi. Every zero of m_{D_j} has
// ||eta|| >= r_j (r_j = 1/(2||Q_j||_F) for structured sets, since Q_j^t eta
// lies in (1/2)(Z^2 \ 2Z^2); r_j = 1/(2 pi gamma_j) in general, bounded below
// by 1/sqrt(40 gamma_j^2)). Since ||eta_j|| decreases strictly, the scan stops
// once it drops below min_j r_j.
class ZeroScanner {
 public:
  explicit ZeroScanner(MoranSystem sys) : sys_(std::move(sys)) {
    validate(sys_);
    bool first = true;
    for (std::size_t n = 1; n <= sys_.span(); ++n) {
      backs_.push_back(inverse(transpose(sys_.matrix(n))));
      Rat r_sq;
      if (const auto* s = std::get_if<StructuredDigitSet>(&sys_.digits(n))) {
        r_sq = Rat(1, 4) / Rat(frobenius_squared(s->q_matrix()));
      } else {
        r_sq = Rat(1, 40) / Rat(max_norm_squared(sys_.digits(n)));
      }
      r_sq.canonicalize();
      if (first || r_sq < stop_sq_) stop_sq_ = r_sq;
      first = false;
    }
  }

  [[nodiscard]] const MoranSystem& system() const noexcept { return sys_; }

  [[nodiscard]] std::optional<ZeroCertificate> scan(const RatVec2& xi) const {
    RatVec2 eta = xi;
    for (std::size_t j = 1;; ++j) {
      if (norm2_squared(eta) < stop_sq_) return std::nullopt;
      eta = backs_[index(j)] * eta;
      if (mask_zero_exact(sys_.digits(j), eta)) {
        return ZeroCertificate{j, eta};
      }
    }
  }

 private:
  [[nodiscard]] std::size_t index(std::size_t n) const {
    const std::size_t pre = sys_.preperiod().size();
    if (n <= pre) return n - 1;
    return pre + (n - 1 - pre) % sys_.period().size();
  }

  MoranSystem sys_;
  std::vector<RatMat2> backs_;
  Rat stop_sq_;
};

inline std::optional<ZeroCertificate> fourier_zero_exact(const MoranSystem& sys,
                                                         const RatVec2& xi) {
  return ZeroScanner(sys).scan(xi);
}

// Replays a certificate exactly: eta in Z(m_{D_j}) and A_j eta = xi.
inline bool verify_certificate(const MoranSystem& sys, const RatVec2& xi,
                               const ZeroCertificate& cert) {
  if (cert.level == 0) return false;
  if (!mask_zero_exact(sys.digits(cert.level), cert.witness)) return false;
  RatVec2 x = cert.witness;
  for (std::size_t j = cert.level; j >= 1; --j) {
    x = to_rational(transpose(sys.matrix(j))) * x;
  }
  return x == xi;
}

// ------------------------------------------------------------ Fourier

struct FourierResult {
  std::complex<double> value;
  double bound = 0;        // certified |mu^ - value| from truncation
  std::size_t levels = 0;  // factors multiplied
  bool exact_zero = false; // value is exactly 0 by a zero certificate
};

// Evaluates prod_j m_{D_j}((M_1* ... M_j*)^{-1} xi), stopping at the first J
// whose tail bound  sum_{j>J} 2 pi gamma ||eta_j||  is at most eps. The tail
// uses |prod a - prod_{j<=J} a| <= sum_{j>J} |1 - a_j| (all |a_j| <= 1) and
// |1 - m_D(eta)| <= 2 pi max||d|| ||eta||, with ||eta_k|| bounded by a
// geometric sequence from ||eta_J||.
class FourierEvaluator {
 public:
  explicit FourierEvaluator(const MoranSystem& sys)
      : pre_(sys.preperiod().size()),
        per_(sys.period().size()),
        scanner_(sys) {
    const ValidationReport v = validate(sys);
    for (std::size_t n = 1; n <= sys.span(); ++n) {
      backs_.push_back(to_double(inverse(transpose(sys.matrix(n)))));
      digits_.push_back(to_double(elements(sys.digits(n))));
    }
    set_tail(v.gamma, v.iota, 1.0);
  }

  explicit FourierEvaluator(const ReducedSystem& red)
      : pre_(red.matrices.prefix().size()),
        per_(red.matrices.cycle().size()) {
    const auto canon = to_double(canonical_D().elements());
    for (std::size_t n = 1; n <= red.matrices.span(); ++n) {
      backs_.push_back(to_double(inverse(transpose(red.matrices.at(n)))));
      digits_.push_back(canon);
    }
    set_tail(std::sqrt(2.0), red.contraction, red.conditioning);
  }

  [[nodiscard]] FourierResult operator()(const Vec2d& xi, double eps) const {
    if (!(eps > 0)) {
      throw error(errc::nonpositive_tolerance, "eps must be positive");
    }
    FourierResult r{1.0, 0.0, 0, false};
    Vec2d eta = xi;
    double bound = tail_ * std::hypot(eta.x, eta.y);
    bool near_zero = false;
    constexpr std::size_t kMaxLevels = 1u << 20;
    while (bound > eps && r.levels < kMaxLevels) {
      const std::size_t i = index(++r.levels);
      eta = backs_[i] * eta;
      const std::complex<double> f = eval_mask(digits_[i], eta);
      near_zero = near_zero || std::abs(f) < 1e-9;
      r.value *= f;
      bound = tail_ * std::hypot(eta.x, eta.y);
    }
    r.bound = bound;
    if (near_zero && scanner_ && scanner_->scan(exact_rational(xi))) {
      return FourierResult{0.0, 0.0, r.levels, true};
    }
    return r;
  }

  [[nodiscard]] FourierResult operator()(const RatVec2& xi, double eps) const {
    if (!(eps > 0)) {
      throw error(errc::nonpositive_tolerance, "eps must be positive");
    }
    if (scanner_) {
      if (auto cert = scanner_->scan(xi)) {
        return FourierResult{0.0, 0.0, cert->level, true};
      }
    }
    return (*this)(to_double(xi), eps);
  }

  [[nodiscard]] double tail_factor() const noexcept { return tail_; }

 private:
  void set_tail(double gamma, double iota, double conditioning) {
    // Slight inflation keeps the bound valid under rounding of iota.
    const double rho = std::min(iota * (1 + 1e-12), 1.0 - 1e-15);
    tail_ = 2.0 * std::numbers::pi * gamma * conditioning * rho / (1.0 - rho);
  }

  [[nodiscard]] std::size_t index(std::size_t n) const {
    if (n <= pre_) return n - 1;
    return pre_ + (n - 1 - pre_) % per_;
  }

  std::size_t pre_;
  std::size_t per_;
  std::optional<ZeroScanner> scanner_;
  std::vector<Mat2d> backs_;
  std::vector<std::vector<Vec2d>> digits_;
  double tail_ = 0;
};

inline FourierResult fourier(const MoranSystem& sys, const Vec2d& xi,
                             double eps) {
  return FourierEvaluator(sys)(xi, eps);
}
inline FourierResult fourier(const MoranSystem& sys, const RatVec2& xi,
                             double eps) {
  return FourierEvaluator(sys)(xi, eps);
}
inline FourierResult fourier(const ReducedSystem& sys, const Vec2d& xi,
                             double eps) {
  return FourierEvaluator(sys)(xi, eps);
}

// ------------------------------------------------------- attractor points

inline constexpr std::size_t kDefaultPointCap = 65536;

// All sums sum_{j<=k} M_1^{-1}...M_j^{-1} d_j; the level-1 digit varies
// slowest.
inline std::vector<Vec2d> attractor_points(const MoranSystem& sys,
                                           std::size_t depth,
                                           std::size_t cap = kDefaultPointCap) {
  if (depth == 0) throw error(errc::invalid_argument, "depth must be >= 1");
  std::size_t total = 1;
  for (std::size_t j = 1; j <= depth; ++j) {
    total *= cardinality(sys.digits(j));
    if (total > cap) {
      throw error(errc::cap_exceeded, "attractor depth " +
                                          std::to_string(depth) +
                                          " exceeds point cap " +
                                          std::to_string(cap));
    }
  }
  std::vector<Vec2d> pts{Vec2d{0.0, 0.0}};
  RatMat2 contraction = RatMat2::identity();
  for (std::size_t j = 1; j <= depth; ++j) {
    contraction = contraction * inverse(sys.matrix(j));
    std::vector<Vec2d> offsets;
    for (const auto& d : elements(sys.digits(j))) {
      offsets.push_back(to_double(contraction * to_rational(d)));
    }
    std::vector<Vec2d> next;
    next.reserve(pts.size() * offsets.size());
    for (const auto& p : pts)
      for (const auto& o : offsets) next.push_back(p + o);
    pts = std::move(next);
  }
  return pts;
}

// ------------------------------------------------------------ t-words

// An eventually periodic word over {1..m} together with the scales t_1..t_m
// (D = t_i * canonical for letter i). Construction checks structure only;
// the number-theoretic hypotheses are reported by theory_violation().
class TWord {
 public:
  static TWord make(std::vector<std::size_t> preperiod,
                    std::vector<std::size_t> period, std::vector<Int> scales) {
    if (period.empty()) {
      throw error(errc::invalid_argument, "word period must be nonempty");
    }
    if (scales.empty()) {
      throw error(errc::invalid_argument, "t-value list must be nonempty");
    }
    for (const auto& t : scales) {
      if (t == 0 || mpz_even_p(t.get_mpz_t())) {
        throw error(errc::oddity_violation,
                    "t-value " + t.get_str() + " must be odd");
      }
    }
    auto check = [&](const std::vector<std::size_t>& letters) {
      for (auto c : letters) {
        if (c < 1 || c > scales.size()) {
          throw error(errc::invalid_argument,
                      "letter " + std::to_string(c) + " outside alphabet 1.." +
                          std::to_string(scales.size()));
        }
      }
    };
    check(preperiod);
    check(period);
    return TWord(EventuallyPeriodic<std::size_t>(std::move(preperiod),
                                                 std::move(period)),
                 std::move(scales));
  }

  [[nodiscard]] const EventuallyPeriodic<std::size_t>& sigma() const noexcept {
    return sigma_;
  }
  [[nodiscard]] const std::vector<Int>& scales() const noexcept {
    return scales_;
  }
  [[nodiscard]] std::size_t alphabet_size() const noexcept {
    return scales_.size();
  }
  [[nodiscard]] const Int& scale_at(std::size_t n) const {
    return scales_[sigma_.at(n) - 1];
  }

  // First violated hypothesis among m >= 2, t_1 = 1, t strictly increasing,
  // t pairwise coprime.
  [[nodiscard]] std::optional<std::string> theory_violation() const {
    if (scales_.size() < 2) return "alphabet needs m >= 2 letters";
    if (scales_.front() != 1) return "t_1 must equal 1";
    for (std::size_t i = 1; i < scales_.size(); ++i) {
      if (!(scales_[i - 1] < scales_[i])) {
        return "t-values must be strictly increasing";
      }
    }
    for (std::size_t i = 0; i < scales_.size(); ++i) {
      for (std::size_t j = i + 1; j < scales_.size(); ++j) {
        Int g;
        mpz_gcd(g.get_mpz_t(), scales_[i].get_mpz_t(), scales_[j].get_mpz_t());
        if (g != 1) {
          return "t_" + std::to_string(i + 1) + " and t_" +
                 std::to_string(j + 1) + " are not coprime";
        }
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const TWord& a, const TWord& b) {
    return a.sigma_ == b.sigma_ && a.scales_ == b.scales_;
  }

 private:
  TWord(EventuallyPeriodic<std::size_t> sigma, std::vector<Int> scales)
      : sigma_(std::move(sigma)), scales_(std::move(scales)) {}

  EventuallyPeriodic<std::size_t> sigma_;
  std::vector<Int> scales_;
};

// A t-word with its matrix sequence: level n is (M_n, t_{sigma_n} D).
struct WordSystem {
  TWord word;
  EventuallyPeriodic<IntMat2> matrices;

  [[nodiscard]] MoranSystem to_system() const {
    return MoranSystem(zip_with(matrices, word.sigma(),
                                [&](const IntMat2& m, std::size_t letter) {
                                  return Level{m, scaled_canonical(
                                                      word.scales()[letter - 1])};
                                }));
  }

  friend bool operator==(const WordSystem& a, const WordSystem& b) {
    return a.word == b.word && a.matrices == b.matrices;
  }
};

// Every matrix in GL(2,2Z) with |det| = 4, expanding.
inline std::optional<std::string> det4_violation(
    const EventuallyPeriodic<IntMat2>& ms) {
  for (std::size_t n = 1; n <= ms.span(); ++n) {
    const IntMat2& m = ms.at(n);
    if (!in_gl2_2z(m)) return "M_" + std::to_string(n) + " not in GL(2,2Z)";
    if (abs(det(m)) != 4) return "|det M_" + std::to_string(n) + "| != 4";
    if (!is_expanding(m)) return "M_" + std::to_string(n) + " not expanding";
  }
  return std::nullopt;
}

struct IntegerPeriodicZero {
  bool nonempty = false;
  std::optional<RatVec2> witness;  // (1/t)(1,0) when nonempty
};

// The integer periodic zero set {xi : mu^(xi + k) = 0 for all k} is nonempty
// iff every letter of sigma carries the same scale t != 1.
inline IntegerPeriodicZero integer_periodic_zero_nonempty(const WordSystem& ws) {
  if (auto why = ws.word.theory_violation()) {
    throw error(errc::out_of_theory, *why);
  }
  if (auto why = det4_violation(ws.matrices)) {
    throw error(errc::out_of_theory, *why);
  }
  const auto& sigma = ws.word.sigma();
  std::set<std::size_t> letters(sigma.prefix().begin(), sigma.prefix().end());
  letters.insert(sigma.cycle().begin(), sigma.cycle().end());
  if (letters.size() != 1) return {};
  const Int& t = ws.word.scales()[*letters.begin() - 1];
  if (t == 1) return {};
  return {true, RatVec2{make_rat(Int(1), t), Rat(0)}};
}

}  // namespace moranspec
