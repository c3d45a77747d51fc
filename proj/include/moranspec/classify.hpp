#pragma once

// Decision procedures for spectrality of eventually periodic Moran systems.
// Each verdict carries the rule that decided it and a trace of the checked
// hypotheses; OutOfTheory names the first hypothesis that failed.

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moranspec/digitsets.hpp"
#include "moranspec/lattice.hpp"
#include "moranspec/moran.hpp"
#include "moranspec/sequence.hpp"

namespace moranspec {

enum class Outcome { spectral, not_spectral, out_of_theory };

enum class Rule { t1_1, t1_4, t1_5, t1_6, c5_1 };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::spectral: return "Spectral";
    case Outcome::not_spectral: return "NotSpectral";
    case Outcome::out_of_theory: return "OutOfTheory";
  }
  return "?";
}

inline std::string to_string(Rule r) {
  switch (r) {
    case Rule::t1_1: return "T1.1";
    case Rule::t1_4: return "T1.4";
    case Rule::t1_5: return "T1.5";
    case Rule::t1_6: return "T1.6";
    case Rule::c5_1: return "C5.1";
  }
  return "?";
}

struct Verdict {
  Outcome outcome = Outcome::out_of_theory;
  Rule rule = Rule::t1_1;
  std::vector<std::string> trace;

  [[nodiscard]] bool decisive() const noexcept {
    return outcome != Outcome::out_of_theory;
  }
  [[nodiscard]] std::string detail() const {
    std::string out;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (i) out += "; ";
      out += trace[i];
    }
    return out;
  }
};

namespace detail {

inline Verdict verdict(Outcome o, Rule r, std::vector<std::string> trace) {
  return Verdict{o, r, std::move(trace)};
}

inline std::string level_name(std::size_t n) {
  return "M_" + std::to_string(n);
}

inline bool divides(const Int& a, const Int& b) {
  return mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()) != 0;
}

}  // namespace detail

// ------------------------------------------------------------ scaled frame

// A system whose digit sets are all P (t_n D) for one unimodular P, written
// in the frame of P: matrices P^{-1} M_n P and digits t_n D. Spectrality is
// unchanged by this change of frame.
struct ScaledFrame {
  IntMat2 frame;
  EventuallyPeriodic<IntMat2> matrices;
  EventuallyPeriodic<Int> scales;
};

inline std::optional<ScaledFrame> scaled_frame(const MoranSystem& sys) {
  if (!sys.all_structured()) return std::nullopt;
  auto shape = [](const StructuredDigitSet& s) {
    Int g;
    mpz_gcd(g.get_mpz_t(), s.alpha().x.get_mpz_t(), s.alpha().y.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), s.beta().x.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), s.beta().y.get_mpz_t());
    const IntMat2 q = s.q_matrix();
    IntMat2 p{Int(q.a11 / g), Int(q.a12 / g), Int(q.a21 / g), Int(q.a22 / g)};
    return std::pair<IntMat2, Int>{std::move(p), std::move(g)};
  };
  const IntMat2 p = shape(std::get<StructuredDigitSet>(sys.digits(1))).first;
  if (!is_unimodular(p)) return std::nullopt;
  const IntMat2 minus_p = Int(-1) * p;
  const RatMat2 pr = to_rational(p);
  const RatMat2 pinv = inverse(p);
  auto scale_of = [&](const Level& l) -> std::optional<Int> {
    const auto [q, g] = shape(std::get<StructuredDigitSet>(l.digits));
    if (q == p) return g;
    if (q == minus_p) return Int(-g);
    return std::nullopt;
  };
  for (std::size_t n = 1; n <= sys.span(); ++n) {
    if (!scale_of(sys.level(n))) return std::nullopt;
  }
  const auto& lv = sys.levels();
  return ScaledFrame{
      p,
      lv.map([&](const Level& l) {
        return to_integer(pinv * to_rational(l.matrix) * pr);
      }),
      lv.map([&](const Level& l) { return *scale_of(l); })};
}

// ------------------------------------------------------------ rules

inline Verdict classify_thm14(const MoranSystem& sys) {
  std::vector<std::string> tr;
  if (!sys.all_structured()) {
    tr.emplace_back("T1.4: digit sets are not all of structured form");
    return detail::verdict(Outcome::out_of_theory, Rule::t1_4, std::move(tr));
  }
  for (std::size_t n = 1; n <= sys.span(); ++n) {
    const IntMat2& m = sys.matrix(n);
    if (!is_expanding(m)) {
      tr.push_back("T1.4: " + detail::level_name(n) + " is not expanding");
      return detail::verdict(Outcome::out_of_theory, Rule::t1_4,
                             std::move(tr));
    }
    if (!(abs(det(m)) > 4)) {
      tr.push_back("T1.4: hypothesis (i) |det " + detail::level_name(n) +
                   "| > 4 fails (det = " + det(m).get_str() + ")");
      return detail::verdict(Outcome::out_of_theory, Rule::t1_4,
                             std::move(tr));
    }
    if (!inverse_norm_below_one(m)) {
      tr.push_back("T1.4: hypothesis (ii) ||" + detail::level_name(n) +
                   "^{-1}|| < 1 fails");
      return detail::verdict(Outcome::out_of_theory, Rule::t1_4,
                             std::move(tr));
    }
  }
  tr.emplace_back("T1.4: hypotheses (i)-(iii) hold");
  for (std::size_t n = 2; n <= sys.span() + 1; ++n) {
    if (!in_gl2_2z(sys.matrix(n))) {
      tr.push_back("T1.4: " + detail::level_name(n) + " = " +
                   to_string(sys.matrix(n)) + " is not in GL(2,2Z)");
      return detail::verdict(Outcome::not_spectral, Rule::t1_4, std::move(tr));
    }
  }
  tr.emplace_back("T1.4: M_n in GL(2,2Z) for all n >= 2");
  return detail::verdict(Outcome::spectral, Rule::t1_4, std::move(tr));
}

// Necessity only: never returns Spectral.
inline Verdict classify_thm11(const MoranSystem& sys) {
  std::vector<std::string> tr;
  if (!sys.all_structured()) {
    tr.emplace_back("T1.1: digit sets are not all of structured form");
    return detail::verdict(Outcome::out_of_theory, Rule::t1_1, std::move(tr));
  }
  for (std::size_t n = 1; n <= sys.span(); ++n) {
    const IntMat2& m = sys.matrix(n);
    if (!is_expanding(m)) {
      tr.push_back("T1.1: " + detail::level_name(n) + " is not expanding");
      return detail::verdict(Outcome::out_of_theory, Rule::t1_1,
                             std::move(tr));
    }
    if (abs(det(m)) < 4) {
      tr.push_back("T1.1: |det " + detail::level_name(n) + "| >= 4 fails (det = " +
                   det(m).get_str() + ")");
      return detail::verdict(Outcome::out_of_theory, Rule::t1_1,
                             std::move(tr));
    }
  }
  for (std::size_t n = 2; n <= sys.span() + 1; ++n) {
    if (!in_gl2_2z(sys.matrix(n))) {
      tr.push_back("T1.1: " + detail::level_name(n) + " = " +
                   to_string(sys.matrix(n)) + " is not in GL(2,2Z)");
      return detail::verdict(Outcome::not_spectral, Rule::t1_1, std::move(tr));
    }
  }
  tr.emplace_back(
      "T1.1: no necessary condition violated (rule gives no sufficiency)");
  return detail::verdict(Outcome::out_of_theory, Rule::t1_1, std::move(tr));
}

inline Verdict classify_thm16(const IntMat2& m1, const IntMat2& m2,
                              const Int& t1, const Int& t2) {
  std::vector<std::string> tr;
  auto oot = [&](std::string why) {
    tr.push_back("T1.6: " + std::move(why));
    return detail::verdict(Outcome::out_of_theory, Rule::t1_6, std::move(tr));
  };
  if (t1 == 0 || mpz_even_p(t1.get_mpz_t())) return oot("t_1 is not odd");
  if (t2 == 0 || mpz_even_p(t2.get_mpz_t())) return oot("t_2 is not odd");
  if (!is_expanding(m1)) return oot("M_1 is not expanding");
  if (!in_gl2_2z(m2)) return oot("M_2 is not in GL(2,2Z)");
  if (abs(det(m2)) != 4) return oot("|det M_2| != 4");
  if (!is_expanding(m2)) return oot("M_2 is not expanding");
  if (detail::divides(t2, t1)) {
    tr.push_back("T1.6: t_2 = " + t2.get_str() + " divides t_1 = " +
                 t1.get_str());
    return detail::verdict(Outcome::spectral, Rule::t1_6, std::move(tr));
  }
  tr.push_back("T1.6: t_2 = " + t2.get_str() + " does not divide t_1 = " +
               t1.get_str());
  return detail::verdict(Outcome::not_spectral, Rule::t1_6, std::move(tr));
}

// (M_1, t_1 D), (M_2, t_2 D), (M_2, t_2 D), ... in some scaled frame.
struct Thm16Shape {
  IntMat2 m1, m2;
  Int t1, t2;
  IntMat2 frame;
};

inline std::optional<Thm16Shape> thm16_shape(const MoranSystem& sys) {
  const auto f = scaled_frame(sys);
  if (!f) return std::nullopt;
  const auto ms = f->matrices.normalized();
  const auto ts = f->scales.normalized();
  if (ms.cycle().size() != 1 || ts.cycle().size() != 1) return std::nullopt;
  if (ms.prefix().size() > 1 || ts.prefix().size() > 1) return std::nullopt;
  return Thm16Shape{f->matrices.at(1), f->matrices.at(2), f->scales.at(1),
                    f->scales.at(2), f->frame};
}

inline Verdict classify_thm16(const MoranSystem& sys) {
  const auto s = thm16_shape(sys);
  if (!s) {
    return detail::verdict(
        Outcome::out_of_theory, Rule::t1_6,
        {"T1.6: system is not (M_1, t_1 D) followed by constant (M_2, t_2 D)"});
  }
  return classify_thm16(s->m1, s->m2, s->t1, s->t2);
}

// Necessity only: t_m | t_{m-1} for (M_n, t_n D) with det-4 matrices whose
// scales are eventually constant from level m >= 2 on.
inline Verdict classify_cor51(const MoranSystem& sys) {
  std::vector<std::string> tr;
  auto oot = [&](std::string why) {
    tr.push_back("C5.1: " + std::move(why));
    return detail::verdict(Outcome::out_of_theory, Rule::c5_1, std::move(tr));
  };
  const auto f = scaled_frame(sys);
  if (!f) return oot("digit sets are not t_n D in a common frame");
  for (std::size_t n = 1; n <= f->matrices.span(); ++n) {
    const IntMat2& m = f->matrices.at(n);
    if (abs(det(m)) != 4) return oot("|det " + detail::level_name(n) + "| != 4");
    if (!is_expanding(m)) {
      return oot(detail::level_name(n) + " is not expanding");
    }
  }
  const auto ts = f->scales.normalized();
  if (ts.cycle().size() != 1) return oot("scales are not eventually constant");
  if (ts.prefix().empty()) return oot("scales are constant (nothing to test)");
  const std::size_t m = ts.prefix().size() + 1;
  const Int& tm = ts.cycle().front();
  const Int& tprev = ts.prefix().back();
  if (!detail::divides(tm, tprev)) {
    tr.push_back("C5.1: t_" + std::to_string(m) + " = " + tm.get_str() +
                 " does not divide t_" + std::to_string(m - 1) + " = " +
                 tprev.get_str());
    return detail::verdict(Outcome::not_spectral, Rule::c5_1, std::move(tr));
  }
  return oot("t_" + std::to_string(m) + " | t_" + std::to_string(m - 1) +
             " holds (rule gives no sufficiency)");
}

inline Verdict classify_thm15(const WordSystem& ws) {
  std::vector<std::string> tr;
  auto oot = [&](std::string why) {
    tr.push_back("T1.5: " + std::move(why));
    return detail::verdict(Outcome::out_of_theory, Rule::t1_5, std::move(tr));
  };
  if (auto why = ws.word.theory_violation()) return oot(*why);
  if (auto why = det4_violation(ws.matrices)) return oot(*why);
  const auto sigma = ws.word.sigma().normalized();
  if (sigma.cycle().size() == 1) {
    const std::size_t j = sigma.cycle().front();
    if (j != 1 && !sigma.prefix().empty()) {
      tr.push_back("T1.5: sigma ends in " + std::to_string(j) +
                   "^inf after a different letter at position " +
                   std::to_string(sigma.prefix().size()) + " (sigma in Sigma_" +
                   std::to_string(sigma.prefix().size()) + ")");
      return detail::verdict(Outcome::not_spectral, Rule::t1_5, std::move(tr));
    }
  }
  tr.emplace_back("T1.5: sigma is in no Sigma_l");
  return detail::verdict(Outcome::spectral, Rule::t1_5, std::move(tr));
}

// The t-word read off a system whose digits are t_n D in a common frame:
// alphabet {1} together with the distinct positive scales in increasing
// order. When every scale is 1 an unused letter with t = 3 keeps m >= 2.
inline std::optional<WordSystem> derive_word(const MoranSystem& sys) {
  const auto f = scaled_frame(sys);
  if (!f) return std::nullopt;
  std::set<Int> values{Int(1)};
  for (std::size_t n = 1; n <= f->scales.span(); ++n) {
    if (f->scales.at(n) < 0) return std::nullopt;
    values.insert(f->scales.at(n));
  }
  if (values.size() == 1) values.insert(Int(3));
  std::vector<Int> alphabet(values.begin(), values.end());
  auto letter = [&](const Int& t) {
    return static_cast<std::size_t>(
        std::find(alphabet.begin(), alphabet.end(), t) - alphabet.begin() + 1);
  };
  const auto sig = f->scales.map(letter);
  return WordSystem{TWord::make(sig.prefix(), sig.cycle(), alphabet),
                    f->matrices};
}

inline Verdict classify_thm15(const MoranSystem& sys) {
  const auto ws = derive_word(sys);
  if (!ws) {
    return detail::verdict(
        Outcome::out_of_theory, Rule::t1_5,
        {"T1.5: digit sets are not t_n D (t_n > 0) in a common frame"});
  }
  return classify_thm15(*ws);
}

// ------------------------------------------------------------ dispatcher

namespace detail {

// Runs rules in order; the first decisive verdict wins, otherwise every
// trace is kept.
template <class... Rules>
Verdict first_decisive(Rules&&... rules) {
  std::vector<std::string> all;
  Verdict last;
  bool done = false;
  auto step = [&](auto&& rule) {
    if (done) return;
    last = rule();
    if (last.decisive()) {
      done = true;
      return;
    }
    all.insert(all.end(), last.trace.begin(), last.trace.end());
  };
  (step(rules), ...);
  if (done) return last;
  return Verdict{Outcome::out_of_theory, last.rule, std::move(all)};
}

}  // namespace detail

// Rules in order T1.4, T1.6, C5.1, T1.5, T1.1.
inline Verdict classify(const MoranSystem& sys) {
  return detail::first_decisive(
      [&] { return classify_thm14(sys); },
      [&] { return classify_thm16(sys); },
      [&] { return classify_cor51(sys); },
      [&] { return classify_thm15(sys); },
      [&] { return classify_thm11(sys); });
}

// A word input is decided by its own alphabet first; the system rules follow.
inline Verdict classify(const WordSystem& ws) {
  const MoranSystem sys = ws.to_system();
  return detail::first_decisive(
      [&] { return classify_thm15(ws); },
      [&] { return classify_thm14(sys); },
      [&] { return classify_thm16(sys); },
      [&] { return classify_cor51(sys); },
      [&] { return classify_thm11(sys); });
}

}  // namespace moranspec
