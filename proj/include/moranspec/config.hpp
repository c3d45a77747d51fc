#pragma once

// YAML configuration for systems, t-words and Hadamard queries.
//
//   system:
//     preperiod: [{matrix: [[3,0],[0,3]], digits: {scaled: 1}}]
//     period:
//       - matrix: [[4,0],[0,4]]
//         digits: {structured: {alpha: [1,0], beta: [0,1]}}
//   word:
//     sigma_preperiod: [2]
//     sigma_period: [3]
//     t_values: [1, 3, 5]
//     matrices: {preperiod: [], period: [[[2,0],[0,2]]]}   # optional, 2I
//   hadamard:
//     matrix: [[12,0],[0,12]]
//     digits: {sum: [1, 6]}              # D + 6D
//     spectrum: {residues: 4, scale: 3}  # or a list of [x, y] rationals
//
// Digit sets are {scaled: t}, {structured: {alpha, beta}}, {generic: [[x,y],
// ...]} or {sum: [k1, k2, ...]} for k1 D + k2 D + .... Numbers are read as
// text and converted exactly; rationals may be written a/b or as decimals.

#include <gmpxx.h>
#include <yaml-cpp/yaml.h>

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moranspec/digitsets.hpp"
#include "moranspec/error.hpp"
#include "moranspec/lattice.hpp"
#include "moranspec/moran.hpp"
#include "moranspec/sequence.hpp"

namespace moranspec {

struct HadamardQuery {
  IntMat2 matrix;
  DigitSet digits;
  std::vector<RatVec2> spectrum;

  friend bool operator==(const HadamardQuery& a, const HadamardQuery& b) {
    return a.matrix == b.matrix && a.digits == b.digits &&
           a.spectrum == b.spectrum;
  }
};

struct Config {
  std::optional<MoranSystem> system;
  std::optional<WordSystem> word;
  std::optional<HadamardQuery> hadamard;

  friend bool operator==(const Config& a, const Config& b) {
    return a.system == b.system && a.word == b.word && a.hadamard == b.hadamard;
  }
};

// ------------------------------------------------------------ scalars

// Exact rational from "a", "a/b" or a decimal such as "-0.25" or "1e-3".
inline std::optional<Rat> parse_rational(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return std::nullopt;
  s = s.substr(first, s.find_last_not_of(" \t") - first + 1);
  if (s.find('/') != std::string::npos) {
    Rat q;
    if (q.set_str(s, 10) != 0 || q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return q;
  }
  Int exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    if (exp10.set_str(s.substr(e + 1), 10) != 0) {
      // mpz rejects a leading '+'
      if (s[e + 1] != '+' || exp10.set_str(s.substr(e + 2), 10) != 0) {
        return std::nullopt;
      }
    }
    s = s.substr(0, e);
  }
  std::string digits;
  long frac_len = 0;
  bool seen_dot = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if ((c == '-' || c == '+') && i == 0) {
      if (c == '-') digits += c;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits += c;
      if (seen_dot) ++frac_len;
    } else {
      return std::nullopt;
    }
  }
  Int num;
  if (digits.empty() || digits == "-" || num.set_str(digits, 10) != 0) {
    return std::nullopt;
  }
  if (!exp10.fits_slong_p()) return std::nullopt;
  const long shift = exp10.get_si() - frac_len;
  Int pow;
  mpz_ui_pow_ui(pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  return shift >= 0 ? Rat(num * pow) : make_rat(num, pow);
}

inline std::optional<Int> parse_integer(const std::string& s) {
  Int v;
  std::string t = !s.empty() && s[0] == '+' ? s.substr(1) : s;
  if (t.empty() || v.set_str(t, 10) != 0) return std::nullopt;
  return v;
}

// "a/b,c/d" or "0.3,0.7".
inline std::optional<RatVec2> parse_rational_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return std::nullopt;
  auto x = parse_rational(s.substr(0, comma));
  auto y = parse_rational(s.substr(comma + 1));
  if (!x || !y) return std::nullopt;
  return RatVec2{*x, *y};
}

// ------------------------------------------------------------ parsing

namespace detail {

[[noreturn]] inline void parse_fail(const YAML::Node& at,
                                    const std::string& what) {
  const YAML::Mark m = at.Mark();
  std::string where = m.is_null() ? std::string("config")
                                  : "line " + std::to_string(m.line + 1) +
                                        ", column " +
                                        std::to_string(m.column + 1);
  throw error(errc::parse_error, where + ": " + what);
}

inline YAML::Node require(const YAML::Node& parent, const char* key) {
  const YAML::Node n = parent[key];
  if (!n) parse_fail(parent, std::string("missing key '") + key + "'");
  return n;
}

inline void require_map(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) parse_fail(n, what + " must be a mapping");
}
inline void require_seq(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) parse_fail(n, what + " must be a list");
}

inline Int read_int(const YAML::Node& n) {
  if (!n.IsScalar()) parse_fail(n, "expected an integer");
  auto v = parse_integer(n.Scalar());
  if (!v) parse_fail(n, "'" + n.Scalar() + "' is not an integer");
  return *v;
}

inline Rat read_rat(const YAML::Node& n) {
  if (!n.IsScalar()) parse_fail(n, "expected a rational number");
  auto v = parse_rational(n.Scalar());
  if (!v) parse_fail(n, "'" + n.Scalar() + "' is not a rational number");
  return *v;
}

inline IntVec2 read_int_vec(const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 2) parse_fail(n, "expected [x, y]");
  return {read_int(n[0]), read_int(n[1])};
}

inline RatVec2 read_rat_vec(const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 2) parse_fail(n, "expected [x, y]");
  return {read_rat(n[0]), read_rat(n[1])};
}

inline IntMat2 read_matrix(const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 2) {
    parse_fail(n, "matrix must be [[a, b], [c, d]]");
  }
  const IntVec2 r1 = read_int_vec(n[0]);
  const IntVec2 r2 = read_int_vec(n[1]);
  return {r1.x, r1.y, r2.x, r2.y};
}

// Library validation errors raised while building a value keep their code
// but gain the position of the offending node.
template <class F>
auto positioned(const YAML::Node& n, F&& f) {
  try {
    return f();
  } catch (const error& e) {
    if (e.code() == errc::parse_error) throw;
    const YAML::Mark m = n.Mark();
    throw error(e.code(),
                "line " + std::to_string(m.line + 1) + ": " + e.message(),
                e.level());
  }
}

inline DigitSet read_digits(const YAML::Node& n) {
  require_map(n, "digits");
  if (n.size() != 1) {
    parse_fail(n, "digits needs exactly one of scaled|structured|generic|sum");
  }
  if (const auto s = n["scaled"]) {
    const Int t = read_int(s);
    return positioned(s, [&]() -> DigitSet { return scaled_canonical(t); });
  }
  if (const auto s = n["structured"]) {
    require_map(s, "structured");
    const IntVec2 a = read_int_vec(require(s, "alpha"));
    const IntVec2 b = read_int_vec(require(s, "beta"));
    return positioned(s, [&]() -> DigitSet { return validate_structured(a, b); });
  }
  if (const auto s = n["generic"]) {
    require_seq(s, "generic");
    std::vector<IntVec2> pts;
    for (const auto& p : s) pts.push_back(read_int_vec(p));
    return positioned(s, [&]() -> DigitSet {
      return GenericDigitSet::make(std::move(pts));
    });
  }
  if (const auto s = n["sum"]) {
    require_seq(s, "sum");
    if (s.size() == 0) parse_fail(s, "sum needs at least one dilation");
    std::vector<Int> ks;
    for (const auto& k : s) ks.push_back(read_int(k));
    return positioned(s, [&]() -> DigitSet {
      GenericDigitSet acc = dilate(ks.front(), canonical_D());
      for (std::size_t i = 1; i < ks.size(); ++i) {
        acc = sum_set(acc, dilate(ks[i], canonical_D()));
      }
      return acc;
    });
  }
  parse_fail(n, "unknown digit set kind");
}

inline std::vector<Level> read_levels(const YAML::Node& n,
                                      const std::string& what) {
  std::vector<Level> out;
  if (!n) return out;
  require_seq(n, what);
  for (const auto& l : n) {
    require_map(l, what + " entry");
    out.push_back(Level{read_matrix(require(l, "matrix")),
                        read_digits(require(l, "digits"))});
  }
  return out;
}

inline MoranSystem read_system(const YAML::Node& n) {
  require_map(n, "system");
  const YAML::Node per = require(n, "period");
  auto pre = read_levels(n["preperiod"], "preperiod");
  auto cyc = read_levels(per, "period");
  if (cyc.empty()) parse_fail(per, "period must be nonempty");
  return positioned(n, [&] { return MoranSystem(std::move(pre), std::move(cyc)); });
}

inline std::vector<std::size_t> read_letters(const YAML::Node& n,
                                             const std::string& what) {
  std::vector<std::size_t> out;
  if (!n) return out;
  require_seq(n, what);
  for (const auto& c : n) {
    const Int v = read_int(c);
    if (v < 1 || !v.fits_ulong_p()) parse_fail(c, "letters are 1, 2, ...");
    out.push_back(v.get_ui());
  }
  return out;
}

inline std::vector<IntMat2> read_matrices(const YAML::Node& n,
                                          const std::string& what) {
  std::vector<IntMat2> out;
  if (!n) return out;
  require_seq(n, what);
  for (const auto& m : n) out.push_back(read_matrix(m));
  return out;
}

inline WordSystem read_word(const YAML::Node& n) {
  require_map(n, "word");
  const YAML::Node sp = require(n, "sigma_period");
  auto pre = read_letters(n["sigma_preperiod"], "sigma_preperiod");
  auto per = read_letters(sp, "sigma_period");
  if (per.empty()) parse_fail(sp, "sigma_period must be nonempty");
  const YAML::Node tv = require(n, "t_values");
  require_seq(tv, "t_values");
  std::vector<Int> ts;
  for (const auto& t : tv) ts.push_back(read_int(t));
  TWord w = positioned(n, [&] {
    return TWord::make(std::move(pre), std::move(per), std::move(ts));
  });
  std::vector<IntMat2> mpre, mper{IntMat2::scalar(Int(2))};
  if (const auto m = n["matrices"]) {
    require_map(m, "matrices");
    const YAML::Node mp = require(m, "period");
    mpre = read_matrices(m["preperiod"], "matrices.preperiod");
    mper = read_matrices(mp, "matrices.period");
    if (mper.empty()) parse_fail(mp, "matrices.period must be nonempty");
  }
  return WordSystem{std::move(w), EventuallyPeriodic<IntMat2>(std::move(mpre),
                                                              std::move(mper))};
}

inline HadamardQuery read_hadamard(const YAML::Node& n) {
  require_map(n, "hadamard");
  HadamardQuery q{read_matrix(require(n, "matrix")),
                  read_digits(require(n, "digits")),
                  {}};
  const YAML::Node s = require(n, "spectrum");
  if (s.IsSequence()) {
    for (const auto& p : s) q.spectrum.push_back(read_rat_vec(p));
  } else if (s.IsMap()) {
    const Int res = read_int(require(s, "residues"));
    const Rat scale = s["scale"] ? read_rat(s["scale"]) : Rat(1);
    if (res < 2 || !res.fits_slong_p()) parse_fail(s, "residues must be >= 2");
    const ResidueSet f(res.get_si());
    for (const auto& p : f.elements()) {
      q.spectrum.push_back(scale * to_rational(p));
    }
  } else {
    parse_fail(s, "spectrum must be a list or {residues, scale}");
  }
  return q;
}

}  // namespace detail

inline Config parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw error(errc::parse_error, "line " + std::to_string(e.mark.line + 1) +
                                       ", column " +
                                       std::to_string(e.mark.column + 1) +
                                       ": " + e.msg);
  }
  if (!root.IsMap()) {
    throw error(errc::parse_error,
                "config must be a mapping with system, word or hadamard");
  }
  Config c;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (key != "system" && key != "word" && key != "hadamard") {
      detail::parse_fail(kv.first, "unknown top-level key '" + key + "'");
    }
  }
  if (const auto n = root["system"]) c.system = detail::read_system(n);
  if (const auto n = root["word"]) c.word = detail::read_word(n);
  if (const auto n = root["hadamard"]) c.hadamard = detail::read_hadamard(n);
  if (!c.system && !c.word && !c.hadamard) {
    throw error(errc::parse_error, "config has no system, word or hadamard");
  }
  return c;
}

// ------------------------------------------------------------ printing

namespace detail {

inline void emit_vec(YAML::Emitter& out, const IntVec2& v) {
  out << YAML::Flow << YAML::BeginSeq << v.x.get_str() << v.y.get_str()
      << YAML::EndSeq;
}
inline void emit_vec(YAML::Emitter& out, const RatVec2& v) {
  out << YAML::Flow << YAML::BeginSeq << v.x.get_str() << v.y.get_str()
      << YAML::EndSeq;
}
inline void emit_matrix(YAML::Emitter& out, const IntMat2& m) {
  out << YAML::Flow << YAML::BeginSeq;
  emit_vec(out, IntVec2{m.a11, m.a12});
  emit_vec(out, IntVec2{m.a21, m.a22});
  out << YAML::EndSeq;
}

inline void emit_digits(YAML::Emitter& out, const DigitSet& d) {
  out << YAML::Flow << YAML::BeginMap;
  if (const auto* s = std::get_if<StructuredDigitSet>(&d)) {
    if (auto t = s->scale()) {
      out << YAML::Key << "scaled" << YAML::Value << t->get_str();
    } else {
      out << YAML::Key << "structured" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "alpha" << YAML::Value;
      emit_vec(out, s->alpha());
      out << YAML::Key << "beta" << YAML::Value;
      emit_vec(out, s->beta());
      out << YAML::EndMap;
    }
  } else {
    out << YAML::Key << "generic" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : std::get<GenericDigitSet>(d).elements()) {
      emit_vec(out, p);
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
}

inline void emit_levels(YAML::Emitter& out, const std::vector<Level>& ls) {
  out << YAML::Block << YAML::BeginSeq;
  for (const auto& l : ls) {
    out << YAML::BeginMap << YAML::Key << "matrix" << YAML::Value;
    emit_matrix(out, l.matrix);
    out << YAML::Key << "digits" << YAML::Value;
    emit_digits(out, l.digits);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
}

template <class T, class F>
void emit_list(YAML::Emitter& out, const std::vector<T>& xs, F&& each) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : xs) each(x);
  out << YAML::EndSeq;
}

}  // namespace detail

inline std::string print_config(const Config& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (c.system) {
    out << YAML::Key << "system" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "preperiod" << YAML::Value;
    detail::emit_levels(out, c.system->preperiod());
    out << YAML::Key << "period" << YAML::Value;
    detail::emit_levels(out, c.system->period());
    out << YAML::EndMap;
  }
  if (c.word) {
    const auto& w = c.word->word;
    auto letters = [&](std::size_t x) { out << std::to_string(x); };
    out << YAML::Key << "word" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "sigma_preperiod" << YAML::Value;
    detail::emit_list(out, w.sigma().prefix(), letters);
    out << YAML::Key << "sigma_period" << YAML::Value;
    detail::emit_list(out, w.sigma().cycle(), letters);
    out << YAML::Key << "t_values" << YAML::Value;
    detail::emit_list(out, w.scales(), [&](const Int& t) { out << t.get_str(); });
    out << YAML::Key << "matrices" << YAML::Value << YAML::BeginMap;
    auto mat = [&](const IntMat2& m) { detail::emit_matrix(out, m); };
    out << YAML::Key << "preperiod" << YAML::Value;
    detail::emit_list(out, c.word->matrices.prefix(), mat);
    out << YAML::Key << "period" << YAML::Value;
    detail::emit_list(out, c.word->matrices.cycle(), mat);
    out << YAML::EndMap << YAML::EndMap;
  }
  if (c.hadamard) {
    out << YAML::Key << "hadamard" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "matrix" << YAML::Value;
    detail::emit_matrix(out, c.hadamard->matrix);
    out << YAML::Key << "digits" << YAML::Value;
    detail::emit_digits(out, c.hadamard->digits);
    out << YAML::Key << "spectrum" << YAML::Value;
    detail::emit_list(out, c.hadamard->spectrum,
                      [&](const RatVec2& p) { detail::emit_vec(out, p); });
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace moranspec
