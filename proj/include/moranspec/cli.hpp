#pragma once

// Subcommands of the moranspec tool. Each returns a Report holding a pretty
// text rendering, a machine-readable JSON block and the process exit code:
// 0 success, 1 NotSpectral under --check, 2 invalid input, 3 parse error,
// 4 resource cap.

#include <gmpxx.h>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "moranspec/classify.hpp"
#include "moranspec/config.hpp"
#include "moranspec/error.hpp"
#include "moranspec/lattice.hpp"
#include "moranspec/mask.hpp"
#include "moranspec/moran.hpp"
#include "moranspec/spectra.hpp"

namespace moranspec {

using json = nlohmann::ordered_json;

enum ExitCode : int {
  exit_ok = 0,
  exit_not_spectral = 1,
  exit_invalid = 2,
  exit_parse = 3,
  exit_cap = 4,
};

inline int exit_code_for(errc e) {
  switch (e) {
    case errc::parse_error: return exit_parse;
    case errc::cap_exceeded: return exit_cap;
    default: return exit_invalid;
  }
}

struct CommandOptions {
  std::optional<RatVec2> xi;
  double eps = 1e-8;
  std::size_t depth = 3;
  Rat box = 8;
  std::size_t grid = 64;
  std::size_t cap = kDefaultPointCap;
  std::string kind = "tower";     // spectrum: tower | lattice
  std::string target;             // emit: attractor | fourier
  std::optional<std::string> out;
  bool check = false;
  std::size_t samples = 8;
  std::uint64_t seed = 0;
};

struct Report {
  std::string command;
  json block;  // deterministic: no timing
  std::string text;
  int exit_code = exit_ok;
  double seconds = 0;

  [[nodiscard]] std::string render() const {
    std::ostringstream os;
    os << text;
    char buf[64];
    std::snprintf(buf, sizeof buf, "runtime: %.3f s\n", seconds);
    os << buf << "--- report ---\n" << block.dump(2) << "\n";
    return os.str();
  }
};

namespace detail {

inline json to_json(const RatVec2& v) {
  return json::array({v.x.get_str(), v.y.get_str()});
}
inline json to_json(const IntMat2& m) {
  return json::array({json::array({m.a11.get_str(), m.a12.get_str()}),
                      json::array({m.a21.get_str(), m.a22.get_str()})});
}

inline const MoranSystem& need_system(const Config& c,
                                      std::optional<MoranSystem>& tmp) {
  if (c.system) return *c.system;
  if (c.word) {
    tmp = c.word->to_system();
    return *tmp;
  }
  throw error(errc::invalid_argument, "config has no system or word");
}

inline const RatVec2& need_xi(const CommandOptions& o) {
  if (!o.xi) throw error(errc::invalid_argument, "--xi is required");
  return *o.xi;
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw error(errc::invalid_argument, "cannot write " + path);
  f << body;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline std::vector<Vec2d> sample_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Vec2d> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng);
    out.push_back({x, u(rng)});
  }
  return out;
}

inline json completeness_json(const CompletenessReport& r) {
  json samples = json::array();
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    samples.push_back({{"xi", {r.samples[i].x, r.samples[i].y}},
                       {"Q", r.values[i]}});
  }
  return {{"truncation_sizes", r.sizes},
          {"eps", r.eps},
          {"monotone", r.monotone},
          {"max_Q", r.max_value},
          {"samples", samples}};
}

}  // namespace detail

// ------------------------------------------------------------- commands

inline Report cmd_validate(const Config& c, const CommandOptions& = {}) {
  std::optional<MoranSystem> tmp;
  const MoranSystem& sys = detail::need_system(c, tmp);
  const ValidationReport v = validate(sys);
  Report r{"validate", {}, {}, exit_ok, 0};
  r.block["result"] = {{"ok", true},
                       {"iota", v.iota},
                       {"gamma", v.gamma},
                       {"existence_bound", v.existence_bound},
                       {"level_inverse_norms", v.level_inverse_norms}};
  r.text = "valid Moran system\n  iota = sup ||M_n^{-1}|| = " + detail::fmt(v.iota) +
           "\n  gamma = max ||d|| = " + detail::fmt(v.gamma) +
           "\n  support radius <= " + detail::fmt(v.existence_bound) + "\n";
  return r;
}

inline Report cmd_classify(const Config& c, const CommandOptions& o = {}) {
  Verdict v;
  if (c.word) {
    v = classify(*c.word);
  } else if (c.system) {
    v = classify(*c.system);
  } else {
    throw error(errc::invalid_argument, "config has no system or word");
  }
  Report r{"classify", {}, {}, exit_ok, 0};
  r.block["result"] = {{"outcome", to_string(v.outcome)},
                       {"rule", to_string(v.rule)},
                       {"detail", v.detail()},
                       {"trace", v.trace}};
  r.block["citations"] = json::array({to_string(v.rule)});
  r.text = "verdict: " + to_string(v.outcome) + " [" + to_string(v.rule) + "]\n";
  for (const auto& t : v.trace) r.text += "  " + t + "\n";
  if (o.check && v.outcome == Outcome::not_spectral) {
    r.exit_code = exit_not_spectral;
  }
  return r;
}

inline Report cmd_hadamard(const Config& c, const CommandOptions& = {}) {
  if (!c.hadamard) throw error(errc::invalid_argument, "config has no hadamard");
  const HadamardQuery& q = *c.hadamard;
  const std::span<const RatVec2> l(q.spectrum);
  const bool ok = is_hadamard_triple(q.matrix, q.digits, l);
  const double res = hadamard_unitarity_residual(q.matrix, q.digits, l);
  Report r{"hadamard", {}, {}, exit_ok, 0};
  r.block["result"] = {{"hadamard_triple", ok},
                       {"unitarity_residual", res},
                       {"digits", describe(q.digits)},
                       {"companions", q.spectrum.size()}};
  r.text = std::string("Hadamard triple: ") + (ok ? "yes" : "no") +
           "\n  max |H*H - I| = " + detail::fmt(res) + "\n";
  return r;
}

inline Report cmd_zero(const Config& c, const CommandOptions& o) {
  std::optional<MoranSystem> tmp;
  const MoranSystem& sys = detail::need_system(c, tmp);
  const RatVec2& xi = detail::need_xi(o);
  const auto cert = fourier_zero_exact(sys, xi);
  Report r{"zero", {}, {}, exit_ok, 0};
  r.block["inputs"] = {{"xi", detail::to_json(xi)}};
  if (cert) {
    const bool replay = verify_certificate(sys, xi, *cert);
    r.block["result"] = {{"zero", true},
                         {"level", cert->level},
                         {"witness", detail::to_json(cert->witness)},
                         {"replay_verified", replay}};
    r.text = "xi = " + to_string(xi) + " is a zero of mu^\n  level j = " +
             std::to_string(cert->level) + ", eta = " +
             to_string(cert->witness) + " in Z(m_{D_j})\n";
  } else {
    r.block["result"] = {{"zero", false}};
    r.text = "xi = " + to_string(xi) + " is not a zero of mu^\n";
  }
  return r;
}

inline Report cmd_fourier(const Config& c, const CommandOptions& o) {
  std::optional<MoranSystem> tmp;
  const MoranSystem& sys = detail::need_system(c, tmp);
  const RatVec2& xi = detail::need_xi(o);
  const FourierResult f = FourierEvaluator(sys)(xi, o.eps);
  Report r{"fourier", {}, {}, exit_ok, 0};
  r.block["inputs"] = {{"xi", detail::to_json(xi)}};
  r.block["result"] = {{"re", f.value.real()},
                       {"im", f.value.imag()},
                       {"abs", std::abs(f.value)},
                       {"bound", f.bound},
                       {"exact_zero", f.exact_zero}};
  r.block["truncation"] = {{"eps", o.eps}, {"levels", f.levels}};
  r.text = "mu^(" + to_string(xi) + ") = " + detail::fmt(f.value.real()) +
           (f.value.imag() < 0 ? " - " : " + ") +
           detail::fmt(std::abs(f.value.imag())) + "i\n  |error| <= " +
           detail::fmt(f.bound) + " after " + std::to_string(f.levels) +
           " factors" + (f.exact_zero ? " (exact zero)" : "") + "\n";
  return r;
}

inline Report cmd_spectrum(const Config& c, const CommandOptions& o) {
  std::optional<MoranSystem> tmp;
  const MoranSystem& sys = detail::need_system(c, tmp);
  std::vector<std::vector<RatVec2>> nested;
  std::string label;
  Report r{"spectrum", {}, {}, exit_ok, 0};
  if (o.kind == "tower") {
    if (o.depth == 0) throw error(errc::invalid_argument, "--depth must be >= 1");
    const SpectrumTower tower = build_tower(sys);
    for (std::size_t k = 1; k <= o.depth; ++k) {
      nested.push_back(enumerate_tower(tower, k, o.cap));
    }
    label = to_string(SpectrumTower::kind());
    r.block["truncation"] = {{"k", o.depth}, {"eps", o.eps}};
  } else if (o.kind == "lattice") {
    const LatticeSpectrum ls = build_lattice_spectrum(sys);
    std::vector<Rat> boxes;
    for (Rat b = 1; b < o.box; b *= 2) boxes.push_back(b);
    boxes.push_back(o.box);
    for (const auto& b : boxes) {
      nested.push_back(ls.enumerate(b));
      if (nested.back().size() > o.cap) {
        throw error(errc::cap_exceeded,
                    "lattice box holds " + std::to_string(nested.back().size()) +
                        " points, cap " + std::to_string(o.cap));
      }
    }
    label = to_string(LatticeSpectrum::kind());
    r.block["citations"] = json::array({"T1.6"});
    r.block["truncation"] = {{"box", o.box.get_str()}, {"eps", o.eps}};
  } else {
    throw error(errc::invalid_argument, "--kind must be tower or lattice");
  }
  const auto& pts = nested.back();
  const OrthogonalityResult orth = verify_orthogonality(sys, pts);
  const auto samples = detail::sample_points(o.samples, o.seed);
  const CompletenessReport comp = completeness_report(sys, nested, samples, o.eps);
  json orth_j = {{"orthogonal", orth.orthogonal},
                 {"pairs_checked", orth.pairs_checked}};
  if (orth.failing) {
    orth_j["failing_pair"] = {detail::to_json(pts[orth.failing->first]),
                              detail::to_json(pts[orth.failing->second])};
  }
  r.block["result"] = {{"kind", label},
                       {"points", pts.size()},
                       {"orthogonality", orth_j},
                       {"completeness", detail::completeness_json(comp)}};
  if (o.out) {
    std::string csv = "x,y\n";
    for (const auto& p : pts) csv += p.x.get_str() + "," + p.y.get_str() + "\n";
    detail::write_file(*o.out, csv);
    r.block["result"]["points_file"] = *o.out;
  }
  r.text = o.kind + " spectrum (" + label + "): " + std::to_string(pts.size()) +
           " points\n  orthogonal: " + (orth.orthogonal ? "yes" : "no") + " (" +
           std::to_string(orth.pairs_checked) + " pairs certified)\n" +
           "  completeness Q over " + std::to_string(samples.size()) +
           " samples: max " + detail::fmt(comp.max_value) + ", monotone " +
           (comp.monotone ? "yes" : "no") + "\n";
  return r;
}

inline Report cmd_oracle(const Config& c, const CommandOptions& o) {
  std::optional<MoranSystem> tmp;
  const MoranSystem& sys = detail::need_system(c, tmp);
  const SpectrumTower tower = build_tower(sys);
  if (o.depth > kDefaultOracleCap) {
    throw error(errc::cap_exceeded, "oracle depth " + std::to_string(o.depth) +
                                        " exceeds cap " +
                                        std::to_string(kDefaultOracleCap));
  }
  const auto pts = enumerate_tower(tower, o.depth, o.cap);
  const OracleResult res = discrete_spectrum_oracle(sys, o.depth, pts);
  Report r{"oracle", {}, {}, exit_ok, 0};
  r.block["result"] = {{"spectral_pair", res.spectral},
                       {"exact_unitary", res.exact_unitary},
                       {"residual", res.residual},
                       {"atoms", res.atoms}};
  r.block["truncation"] = {{"n", o.depth}};
  r.text = "level-" + std::to_string(o.depth) + " tower vs mu_" +
           std::to_string(o.depth) + ": " +
           (res.spectral ? "spectral pair" : "not a spectral pair") +
           "\n  residual " + detail::fmt(res.residual) + "\n";
  return r;
}

inline Report cmd_emit(const Config& c, const CommandOptions& o) {
  std::optional<MoranSystem> tmp;
  const MoranSystem& sys = detail::need_system(c, tmp);
  if (!o.out) throw error(errc::invalid_argument, "emit needs --out");
  Report r{"emit", {}, {}, exit_ok, 0};
  std::ostringstream csv;
  csv.precision(17);
  std::size_t rows = 0;
  if (o.target == "attractor") {
    csv << "x,y\n";
    for (const auto& p : attractor_points(sys, o.depth, o.cap)) {
      csv << p.x << "," << p.y << "\n";
      ++rows;
    }
    r.block["truncation"] = {{"depth", o.depth}};
  } else if (o.target == "fourier") {
    if (o.grid < 2) throw error(errc::invalid_argument, "--grid must be >= 2");
    if (o.grid * o.grid > o.cap) {
      throw error(errc::cap_exceeded, "grid " + std::to_string(o.grid) +
                                          "^2 exceeds cap " +
                                          std::to_string(o.cap));
    }
    const FourierEvaluator ev(sys);
    const double b = o.box.get_d();
    const double step = 2 * b / static_cast<double>(o.grid - 1);
    csv << "x,y,absval\n";
    for (std::size_t i = 0; i < o.grid; ++i) {
      for (std::size_t j = 0; j < o.grid; ++j) {
        const Vec2d xi{-b + step * static_cast<double>(j),
                       -b + step * static_cast<double>(i)};
        csv << xi.x << "," << xi.y << "," << std::abs(ev(xi, o.eps).value)
            << "\n";
        ++rows;
      }
    }
    r.block["truncation"] = {{"grid", o.grid}, {"box", o.box.get_str()}, {"eps", o.eps}};
  } else {
    throw error(errc::invalid_argument, "emit target must be attractor or fourier");
  }
  detail::write_file(*o.out, csv.str());
  r.block["result"] = {{"target", o.target}, {"rows", rows}, {"file", *o.out}};
  r.text = "wrote " + std::to_string(rows) + " rows to " + *o.out + "\n";
  return r;
}

// ------------------------------------------------------------- dispatch

inline Report error_report(const std::string& command, const error& e) {
  Report r{command, {}, {}, exit_code_for(e.code()), 0};
  json err = {{"code", std::string(to_string(e.code()))},
              {"message", e.message()}};
  if (e.level()) err["level"] = *e.level();
  r.block["error"] = err;
  r.text = "error: " + std::string(e.what()) +
           (e.level() ? " (level " + std::to_string(*e.level()) + ")" : "") +
           "\n";
  return r;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{
      "validate", "classify", "hadamard", "zero",
      "fourier",  "spectrum", "oracle",   "emit"};
  return names;
}

// Parses the config text and runs one command; never throws for library
// errors.
inline Report run_command(const std::string& command,
                          const std::string& config_text,
                          const CommandOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  try {
    const Config c = parse_config(config_text);
    if (command == "validate") r = cmd_validate(c, o);
    else if (command == "classify") r = cmd_classify(c, o);
    else if (command == "hadamard") r = cmd_hadamard(c, o);
    else if (command == "zero") r = cmd_zero(c, o);
    else if (command == "fourier") r = cmd_fourier(c, o);
    else if (command == "spectrum") r = cmd_spectrum(c, o);
    else if (command == "oracle") r = cmd_oracle(c, o);
    else if (command == "emit") r = cmd_emit(c, o);
    else throw error(errc::invalid_argument, "unknown command " + command);
    r.block["inputs"]["config"] = print_config(c);
  } catch (const error& e) {
    r = error_report(command, e);
  }
  json ordered = {{"command", command}};
  for (auto& [k, v] : r.block.items()) ordered[k] = v;
  ordered["exit_code"] = r.exit_code;
  r.block = std::move(ordered);
  r.command = command;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

}  // namespace moranspec
