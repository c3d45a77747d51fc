// Acceptance suite. `acceptance` runs every criterion, `acceptance N` runs
// criterion N only. Each prints one PASS/FAIL line; a criterion also fails
// when it exceeds its time limit. Tolerances and limits are fixed below.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "moranspec/classify.hpp"
#include "moranspec/spectra.hpp"

using namespace moranspec;
using fx::mat;
using fx::q;
using fx::rv;
using fx::scalar;

namespace {

struct Outcome_ {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome_()> run;
};

// Collects failures and a short summary line.
class Check {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && first_failure_.empty()) first_failure_ = what;
    ok_ = ok_ && cond;
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += s;
  }
  [[nodiscard]] Outcome_ done() const {
    std::string d = notes_;
    if (!ok_) d = "first failure: " + first_failure_ + (d.empty() ? "" : "; " + d);
    return {ok_, d};
  }

 private:
  bool ok_ = true;
  std::string first_failure_;
  std::string notes_;
};

std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// ------------------------------------------------------------------ 1
Outcome_ hadamard_fixtures() {
  Check c;
  const auto f2 = fx::residues(2);
  c.expect(is_hadamard_triple(scalar(2), fx::D(), std::span<const RatVec2>(f2)),
           "(2I, D, F_2)");
  const auto l = fx::residues(4, 3);
  const DigitSet d6 = fx::d_plus_6d();
  c.expect(is_hadamard_triple(scalar(12), d6, std::span<const RatVec2>(l)),
           "(12I, D+6D, 3F_4)");
  c.note("both triples exact");
  return c.done();
}

// ------------------------------------------------------------------ 2
Outcome_ zero_set_identity() {
  constexpr double kTol = 1e-10;
  Check c;
  const StructuredDigitSet d = canonical_D();
  const DigitSet dv = d;
  std::size_t points = 0, zeros = 0;
  for (long den = 1; den <= 24; ++den) {
    for (long a = 0; a < den; ++a) {
      for (long b = 0; b < den; ++b) {
        const RatVec2 xi = rv(q(a, den), q(b, den));
        const bool exact = mask_zero_exact(d, xi);
        const bool numeric = std::abs(eval_mask(dv, to_double(xi))) < kTol;
        ++points;
        zeros += exact;
        c.expect(exact == numeric, "xi = " + to_string(xi));
      }
    }
  }
  c.note(std::to_string(points) + " points, " + std::to_string(zeros) + " zeros");
  return c.done();
}

// ------------------------------------------------------------------ 3
Outcome_ partition_of_unity() {
  constexpr double kTol = 1e-10;
  Check c;
  const auto f2 = fx::residues(2);
  const auto l = fx::residues(4, 3);
  const DigitSet d6 = fx::d_plus_6d();
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const Vec2d xi{i / 50.0, j / 50.0};
      const double a = std::abs(partition_of_unity_sum(scalar(2), fx::D(), f2, xi) - 1);
      const double b = std::abs(partition_of_unity_sum(scalar(12), d6, l, xi) - 1);
      worst = std::max({worst, a, b});
    }
  }
  c.expect(worst <= kTol, "max deviation " + num(worst));
  c.note("max |sum - 1| = " + num(worst, 3));
  return c.done();
}

// ------------------------------------------------------------------ 4
Outcome_ closed_form_zero_set() {
  Check c;
  const std::vector<IntMat2> bars{IntMat2::identity(), mat(1, 1, 0, 1), mat(0, -1, 1, 0)};
  std::size_t certified = 0;
  for (const auto& bar : bars) {
    for (long t : {1, 3, 5}) {
      const MoranSystem sys = fx::constant(Int(2) * bar, t);
      const ZeroScanner scan(sys);
      for (long a = -6; a <= 6; ++a) {
        for (long b = -6; b <= 6; ++b) {
          if (a == 0 && b == 0) continue;
          const RatVec2 xi = rv(q(a, t), q(b, t));
          const auto cert = scan.scan(xi);
          c.expect(cert && verify_certificate(sys, xi, *cert),
                   "missing certificate " + to_string(bar) + " t=" + std::to_string(t) +
                       " xi=" + to_string(xi));
          certified += cert.has_value();
        }
      }
      c.expect(!scan.scan(rv(q(1, t + 2), q(0))), "spurious zero at (1/(t+2), 0)");
      c.expect(!scan.scan(rv(q(0), q(0))), "spurious zero at 0");
    }
  }
  c.note(std::to_string(certified) + " certificates replayed");
  return c.done();
}

// ------------------------------------------------------------------ 5
Outcome_ classifier_tables() {
  Check c;
  auto is = [&](const Verdict& v, moranspec::Outcome o, const std::string& what) {
    c.expect(v.outcome == o, what + " gave " + to_string(v.outcome));
  };
  using O = moranspec::Outcome;
  is(classify_thm14(fx::constant(scalar(3))), O::not_spectral, "T1.4 3I");
  is(classify_thm14(MoranSystem({Level{scalar(3), fx::D()}}, {Level{scalar(4), fx::D()}})),
     O::spectral, "T1.4 3I then 4I");
  is(classify_thm14(fx::constant(mat(4, 2, 2, 4))), O::spectral, "T1.4 [[4,2],[2,4]]");

  const std::vector<std::tuple<long, long, O>> t16{
      {9, 3, O::spectral}, {3, 9, O::not_spectral}, {5, 5, O::spectral}, {3, 5, O::not_spectral}};
  for (const auto& [t1, t2, want] : t16) {
    const MoranSystem sys({Level{scalar(2), fx::D(t1)}}, {Level{scalar(2), fx::D(t2)}});
    is(classify_thm16(sys), want,
       "T1.6 (" + std::to_string(t1) + "," + std::to_string(t2) + ")");
  }

  is(classify_thm15(fx::word({}, {1, 2}, {1, 3})), O::spectral, "T1.5 (12)^inf");
  is(classify_thm15(fx::word({2}, {3}, {1, 3, 5})), O::not_spectral, "T1.5 2 3^inf");
  is(classify_thm15(fx::word({}, {2}, {1, 3})), O::spectral, "T1.5 2^inf");
  is(classify_thm15(fx::word({1}, {2}, {1, 3})), O::not_spectral, "T1.5 1 2^inf");
  c.note("11 table entries");
  return c.done();
}

// ------------------------------------------------------------------ 6
Outcome_ tower_orthogonality() {
  Check c;
  std::size_t pairs = 0;
  for (long s : {4, 2}) {
    const MoranSystem sys = fx::constant(scalar(s));
    const SpectrumTower tower = build_tower(sys);
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto pts = enumerate_tower(tower, k);
      const auto r = verify_orthogonality(sys, pts);
      c.expect(r.orthogonal, std::to_string(s) + "I tower k=" + std::to_string(k));
      if (k == 4) {
        c.expect(pts.size() == 256 && r.pairs_checked == 32640,
                 "k=4 size " + std::to_string(pts.size()));
      }
      pairs += r.pairs_checked;
    }
  }
  c.note(std::to_string(pairs) + " pairs certified");
  return c.done();
}

// ------------------------------------------------------------------ 7
Outcome_ oracle_cross_check() {
  constexpr double kTol = 1e-10;
  Check c;
  double worst = 0;
  for (long s : {4, 2}) {
    const MoranSystem sys = fx::constant(scalar(s));
    const SpectrumTower tower = build_tower(sys);
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto r = discrete_spectrum_oracle(sys, n, enumerate_tower(tower, n));
      c.expect(r.exact_unitary && r.spectral,
               std::to_string(s) + "I n=" + std::to_string(n));
      c.expect(r.residual < kTol, "residual " + num(r.residual));
      worst = std::max(worst, r.residual);
    }
  }
  c.note("max residual " + num(worst, 3));
  return c.done();
}

// ------------------------------------------------------------------ 8
Outcome_ completeness_contrast() {
  constexpr double kEps = 1e-8;
  constexpr double kLatticeTarget = 0.99;
  constexpr double kTowerCeiling = 0.9;
  Check c;
  const MoranSystem sys = fx::constant(scalar(2));
  const FourierEvaluator ev(sys);
  const LatticeSpectrum lat = build_lattice_spectrum(sys);
  double best = 0;
  long best_b = 0;
  std::string trail;
  for (long b = 1; b <= 16; ++b) {
    const double v = completeness_sum(ev, lat.enumerate(q(b)), {0.3, 0.7}, kEps);
    if (v > best) {
      best = v;
      best_b = b;
    }
    if (b == 4 || b == 8 || b == 16) trail += " B=" + std::to_string(b) + ":" + num(v, 4);
  }
  c.expect(best >= kLatticeTarget, "lattice Q at (0.3,0.7) peaks at " + num(best, 4) +
                                       " (B=" + std::to_string(best_b) + "), below " +
                                       num(kLatticeTarget));
  const auto tower = enumerate_tower(build_tower(sys), 5);
  const double tv = completeness_sum(ev, tower, {-0.49, -0.49}, kEps);
  c.expect(tv <= kTowerCeiling, "tower Q = " + num(tv, 4));
  c.note("lattice Q" + trail + "; tower Lambda_5 Q(-0.49,-0.49) = " + num(tv, 4));
  return c.done();
}

// ------------------------------------------------------------------ 9
Outcome_ integer_periodic_zero() {
  Check c;
  const WordSystem ws = fx::word({}, {2}, {1, 3});
  const auto r = integer_periodic_zero_nonempty(ws);
  c.expect(r.nonempty && r.witness && *r.witness == rv(q(1, 3), q(0)), "2^inf with t=3");
  c.expect(!integer_periodic_zero_nonempty(fx::word({}, {1, 2}, {1, 3})).nonempty, "(12)^inf");
  c.expect(!integer_periodic_zero_nonempty(fx::word({}, {1}, {1, 3})).nonempty, "1^inf");
  if (r.witness) {
    const MoranSystem sys = ws.to_system();
    const ZeroScanner scan(sys);
    std::size_t n = 0;
    for (long a = -4; a <= 4; ++a) {
      for (long b = -4; b <= 4; ++b) {
        const RatVec2 xi = *r.witness + rv(q(a), q(b));
        const auto cert = scan.scan(xi);
        c.expect(cert && verify_certificate(sys, xi, *cert), "no certificate at " + to_string(xi));
        n += cert.has_value();
      }
    }
    c.note(std::to_string(n) + " translates certified");
  }
  return c.done();
}

// ------------------------------------------------------------------ 10
Outcome_ similarity_invariance() {
  constexpr double kEps = 1e-8;
  constexpr double kTol = 2e-8;
  Check c;
  std::mt19937_64 rng(20240611);
  const auto qs = oracle::unimodular(20, 3, rng);
  // Every rule is represented. T1.4 appears only with scalar matrices: its
  // hypothesis ||M_n^{-1}|| < 1 is not preserved by conjugation otherwise.
  const std::vector<MoranSystem> corpus{
      fx::constant(scalar(4)),
      fx::constant(scalar(3)),
      MoranSystem({Level{scalar(3), fx::D()}}, {Level{scalar(4), fx::D()}}),
      fx::constant(scalar(2)),
      MoranSystem({Level{scalar(2), fx::D(9)}}, {Level{scalar(2), fx::D(3)}}),
      MoranSystem({Level{mat(2, 2, 0, 2), fx::D(3)}}, {Level{mat(0, -2, 2, 0), fx::D(9)}}),
      MoranSystem({Level{scalar(2), fx::D(3)}, Level{scalar(2), fx::D(5)}},
                  {Level{scalar(2), fx::D(7)}}),
      MoranSystem({}, {Level{scalar(2), fx::D()}, Level{scalar(2), fx::D(3)}}),
      MoranSystem({Level{scalar(2), fx::D(5)}}, {Level{scalar(2), fx::D(3)}}),
      fx::constant(mat(2, 1, 0, 2)),
      fx::constant(scalar(2), fx::d_plus_6d()),
  };
  std::size_t verdicts = 0;
  for (const auto& sys : corpus) {
    const Verdict base = classify(sys);
    for (const auto& qo : qs) {
      const Verdict moved = classify(sys.conjugated(fx::from(qo)));
      c.expect(moved.outcome == base.outcome,
               "verdict changed under " + to_string(fx::from(qo)));
      ++verdicts;
    }
  }

  // Fourier covariance on systems whose conjugates stay valid for every Q.
  const std::vector<MoranSystem> fourier_corpus{
      fx::constant(scalar(2)), fx::constant(scalar(4), 3),
      MoranSystem({Level{scalar(3), fx::D()}}, {Level{scalar(2), fx::D(5)}})};
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<Vec2d> xis;
  for (int i = 0; i < 20; ++i) xis.push_back({u(rng), u(rng)});
  double worst = 0;
  for (const auto& sys : fourier_corpus) {
    const FourierEvaluator base(sys);
    for (const auto& qo : qs) {
      const IntMat2 qm = fx::from(qo);
      const FourierEvaluator moved(sys.conjugated(qm));
      const Mat2d qt = to_double(transpose(qm));
      for (const auto& xi : xis) {
        worst = std::max(worst, std::abs(moved(xi, kEps).value - base(qt * xi, kEps).value));
      }
    }
  }
  c.expect(worst <= kTol, "Fourier covariance deviation " + num(worst));
  c.note(std::to_string(verdicts) + " verdicts compared; max |mu'^ - mu^ o Q^t| = " +
         num(worst, 3));
  return c.done();
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "Hadamard fixtures", 1, hadamard_fixtures},
      {2, "zero-set identity of the canonical mask", 5, zero_set_identity},
      {3, "partition of unity", 5, partition_of_unity},
      {4, "closed-form Moran zero set", 10, closed_form_zero_set},
      {5, "classifier tables", 1, classifier_tables},
      {6, "tower orthogonality", 60, tower_orthogonality},
      {7, "discrete oracle cross-check", 30, oracle_cross_check},
      {8, "completeness contrast", 60, completeness_contrast},
      {9, "integer periodic zero set", 10, integer_periodic_zero},
      {10, "similarity invariance", 30, similarity_invariance},
  };
  return all;
}

bool run_one(const Criterion& cr) {
  const auto start = std::chrono::steady_clock::now();
  Outcome_ r;
  try {
    r = cr.run();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = r.ok;
  if (secs > cr.limit_seconds) {
    ok = false;
    r.detail += "; exceeded " + num(cr.limit_seconds) + " s";
  }
  std::printf("%s criterion %d: %s (%s) [%.3f s]\n", ok ? "PASS" : "FAIL", cr.id, cr.name,
              r.detail.c_str(), secs);
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::fprintf(stderr, "usage: acceptance [criterion]\n");
    return 2;
  }
  if (argc == 2) {
    const int id = std::atoi(argv[1]);
    for (const auto& cr : criteria()) {
      if (cr.id == id) return run_one(cr) ? 0 : 1;
    }
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  bool all = true;
  for (const auto& cr : criteria()) all = run_one(cr) && all;
  return all ? 0 : 1;
}
