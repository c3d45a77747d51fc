#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "moranspec/spectra.hpp"

using namespace moranspec;
using fx::mat;
using fx::q;
using fx::rv;
using fx::scalar;

namespace {

errc code_of(auto&& f) {
  try {
    f();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return errc::invalid_argument;
}

std::set<RatVec2> as_set(const std::vector<RatVec2>& v) { return {v.begin(), v.end()}; }

std::set<RatVec2> scaled_residues(long n, long scale) {
  return as_set(fx::residues(n, scale));
}

// Q at xi over the integer box [-b, b]^2 for constant (2I, D), via the
// long-product oracle.
long double oracle_box_sum(long b, long double x, long double y) {
  long double total = 0;
  for (long i = -b; i <= b; ++i)
    for (long j = -b; j <= b; ++j)
      total += std::norm(oracle::long_product({2, 0, 0, 2}, oracle::canonical(),
                                              x + i, y + j, 80));
  return total;
}

}  // namespace

// ----------------------------------------------------------- towers

TEST(BuildTower, Examples) {
  const auto t4 = build_tower(fx::constant(scalar(4)));
  for (std::size_t j = 1; j <= 3; ++j) {
    EXPECT_EQ(as_set(t4.companions(j)), scaled_residues(2, 2));
  }
  const auto t2 = build_tower(fx::constant(scalar(2)));
  EXPECT_EQ(as_set(t2.companions(1)), scaled_residues(2, 1));
  EXPECT_EQ(t2.product(1), IntMat2::identity());
  EXPECT_EQ(t2.product(3), scalar(4));
  EXPECT_EQ(SpectrumTower::kind(), SpectrumKind::orthogonal_candidate);

  try {
    build_tower(fx::constant(scalar(3)));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::tower_unavailable);
    EXPECT_EQ(e.level(), 2u);
  }
}

TEST(BuildTower, FirstLevelIsExempt) {
  const MoranSystem sys({Level{scalar(3), fx::D()}}, {Level{scalar(4), fx::D()}});
  const auto t = build_tower(sys);
  EXPECT_FALSE(is_integral(t.companions(1)[1]));
  for (std::size_t j = 2; j <= 4; ++j)
    for (const auto& l : t.companions(j)) EXPECT_TRUE(is_integral(l));
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto pts = enumerate_tower(t, k);
    EXPECT_TRUE(verify_orthogonality(sys, pts).orthogonal) << k;
  }
}

TEST(BuildTower, ContainsZeroAtEveryLevel) {
  const MoranSystem sys({Level{mat(2, 2, 0, 2), fx::D(3)}},
                        {Level{mat(4, 2, 2, 4), fx::D()}, Level{scalar(2), fx::D(5)}});
  const auto t = build_tower(sys);
  for (std::size_t j = 1; j <= 6; ++j) {
    EXPECT_TRUE(as_set(t.companions(j)).count(rv(q(0), q(0))));
  }
}

TEST(EnumerateTower, Examples) {
  const auto t2 = build_tower(fx::constant(scalar(2)));
  EXPECT_EQ(as_set(enumerate_tower(t2, 1)), scaled_residues(2, 1));
  EXPECT_EQ(as_set(enumerate_tower(t2, 2)), scaled_residues(4, 1));

  const auto t4 = build_tower(fx::constant(scalar(4)));
  const auto pts = enumerate_tower(t4, 2);
  EXPECT_EQ(pts.size(), 16u);
  std::set<RatVec2> want;
  for (const auto& a : fx::residues(2, 2))
    for (const auto& b : fx::residues(2, 8)) want.insert(a + b);
  EXPECT_EQ(as_set(pts), want);
  EXPECT_EQ(code_of([&] { enumerate_tower(t4, 9); }), errc::cap_exceeded);
}

// ----------------------------------------------------------- orthogonality

TEST(Orthogonality, Examples) {
  const auto sys = fx::constant(scalar(2));
  const auto f4 = fx::residues(4);
  const auto r = verify_orthogonality(sys, f4);
  EXPECT_TRUE(r.orthogonal);
  EXPECT_EQ(r.pairs_checked, 120u);

  const std::vector<RatVec2> bad{rv(q(0), q(0)), rv(q(1, 3), q(0))};
  const auto b = verify_orthogonality(sys, bad);
  EXPECT_FALSE(b.orthogonal);
  ASSERT_TRUE(b.failing.has_value());
  EXPECT_EQ(*b.failing, (std::pair<std::size_t, std::size_t>{0, 1}));

  const std::vector<RatVec2> one{rv(q(5, 7), q(1))};
  EXPECT_TRUE(verify_orthogonality(fx::constant(scalar(4), fx::d_plus_6d()), one).orthogonal);
}

TEST(Orthogonality, TowersUpToFourLevels) {
  for (long s : {2, 4}) {
    const auto sys = fx::constant(scalar(s));
    const auto t = build_tower(sys);
    for (std::size_t k = 1; k <= 4; ++k) {
      EXPECT_TRUE(verify_orthogonality(sys, enumerate_tower(t, k)).orthogonal)
          << s << " k=" << k;
    }
  }
}

TEST(Orthogonality, SpectrumMovesUnderSimilarity) {
  std::mt19937_64 rng(41);
  const auto qs = oracle::unimodular(10, 3, rng);
  for (long s : {2, 4}) {
    const auto sys = fx::constant(scalar(s));
    const auto pts = enumerate_tower(build_tower(sys), 3);
    for (const auto& qo : qs) {
      const IntMat2 qm = fx::from(qo);
      const auto moved = transform_spectrum(qm, pts);
      EXPECT_TRUE(verify_orthogonality(sys.conjugated(qm), moved).orthogonal)
          << to_string(qm);
    }
  }
}

// ----------------------------------------------------------- lattice

TEST(LatticeSpectrum, ConstantTwoIsTheIntegerLattice) {
  const auto lat = build_lattice_spectrum(fx::constant(scalar(2)));
  EXPECT_EQ(LatticeSpectrum::kind(), SpectrumKind::certified_spectrum);
  std::set<RatVec2> want;
  for (long i = -3; i <= 3; ++i)
    for (long j = -3; j <= 3; ++j) want.insert(rv(q(i), q(j)));
  EXPECT_EQ(as_set(lat.enumerate(q(3))), want);
  EXPECT_EQ(lat.enumerate(q(1, 2)).size(), 1u);
}

TEST(LatticeSpectrum, ShearedFirstLevel) {
  const MoranSystem sys({Level{mat(2, 2, 0, 2), fx::D()}}, {Level{scalar(2), fx::D()}});
  const auto lat = build_lattice_spectrum(sys);
  // Oracle: (1/2) M1^t F_2 + M1^t Z^2, M1^t = [[2,0],[2,2]], filtered to the box.
  std::set<RatVec2> want;
  const long b = 6;
  for (const auto& f : fx::residues(2)) {
    for (long i = -10; i <= 10; ++i) {
      for (long j = -10; j <= 10; ++j) {
        const Rat kx = Rat(f.x / 2) + i, ky = Rat(f.y / 2) + j;
        const Rat x = 2 * kx, y = 2 * kx + 2 * ky;
        if (abs(x) <= b && abs(y) <= b) want.insert(rv(x, y));
      }
    }
  }
  const auto got = lat.enumerate(q(b));
  EXPECT_EQ(as_set(got), want);
  EXPECT_TRUE(verify_orthogonality(sys, got).orthogonal);
}

TEST(LatticeSpectrum, Errors) {
  const MoranSystem bad({Level{scalar(2), fx::D(3)}}, {Level{scalar(2), fx::D(9)}});
  EXPECT_EQ(code_of([&] { build_lattice_spectrum(bad); }), errc::out_of_theory);
  EXPECT_EQ(code_of([] { build_lattice_spectrum(fx::constant(scalar(4))); }),
            errc::out_of_theory);
}

TEST(LatticeSpectrum, OrthogonalForDivisibleScales) {
  const MoranSystem sys({Level{scalar(2), fx::D(9)}}, {Level{scalar(2), fx::D(3)}});
  const auto pts = build_lattice_spectrum(sys).enumerate(q(2));
  EXPECT_GT(pts.size(), 1u);
  EXPECT_TRUE(verify_orthogonality(sys, pts).orthogonal);
}

// ----------------------------------------------------------- completeness

TEST(Completeness, Examples) {
  const auto sys = fx::constant(scalar(2));
  const auto lat = build_lattice_spectrum(sys).enumerate(q(8));
  EXPECT_NEAR(completeness_sum(sys, lat, {0, 0}, 1e-8), 1.0, 1e-9);

  // At (0.3, 0.7) the box B = 8 sum is far from 1; the value is pinned to
  // the long-product oracle rather than to a convergence target.
  const double got = completeness_sum(sys, lat, {0.3, 0.7}, 1e-8);
  EXPECT_NEAR(got, static_cast<double>(oracle_box_sum(8, 0.3L, 0.7L)), 1e-7);

  const auto tower = enumerate_tower(build_tower(sys), 5);
  EXPECT_LT(completeness_sum(sys, tower, {-0.49, -0.49}, 1e-8), 0.9);
  EXPECT_THROW(completeness_sum(sys, tower, {0, 0}, 0.0), error);
}

TEST(Completeness, BoundedByOneForOrthogonalSets) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto sys = fx::constant(scalar(2));
  const FourierEvaluator ev(sys);
  const auto tower = enumerate_tower(build_tower(sys), 3);
  const auto lat = build_lattice_spectrum(sys).enumerate(q(4));
  for (int i = 0; i < 100; ++i) {
    const Vec2d xi{u(rng), u(rng)};
    EXPECT_LE(completeness_sum(ev, tower, xi, 1e-8), 1 + 1e-6);
    EXPECT_LE(completeness_sum(ev, lat, xi, 1e-8), 1 + 1e-6);
  }
}

TEST(Completeness, MonotoneUnderInclusion) {
  const auto sys = fx::constant(scalar(4));
  const auto tower = build_tower(sys);
  std::vector<std::vector<RatVec2>> nested;
  for (std::size_t k = 1; k <= 4; ++k) nested.push_back(enumerate_tower(tower, k));
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<Vec2d> samples;
  for (int i = 0; i < 10; ++i) samples.push_back({u(rng), u(rng)});
  const auto rep = completeness_report(sys, nested, samples, 1e-8);
  EXPECT_TRUE(rep.monotone);
  EXPECT_EQ(rep.sizes, (std::vector<std::size_t>{4, 16, 64, 256}));
  EXPECT_LE(rep.max_value, 1 + 1e-6);
  for (const auto& row : rep.values)
    for (std::size_t k = 1; k < row.size(); ++k) EXPECT_GE(row[k], row[k - 1] - 2e-8);
}

// ----------------------------------------------------------- oracle

TEST(DiscreteOracle, Examples) {
  const auto s4 = fx::constant(scalar(4));
  const auto f22 = fx::residues(2, 2);
  const auto a = discrete_spectrum_oracle(s4, 1, f22);
  EXPECT_TRUE(a.spectral);
  EXPECT_TRUE(a.exact_unitary);
  EXPECT_LT(a.residual, 1e-10);

  const auto s2 = fx::constant(scalar(2));
  const auto f4 = fx::residues(4);
  EXPECT_TRUE(discrete_spectrum_oracle(s2, 2, f4).spectral);

  const auto f2 = fx::residues(2);
  const auto c = discrete_spectrum_oracle(s4, 1, f2);
  EXPECT_FALSE(c.spectral);
  EXPECT_FALSE(c.exact_unitary);
  EXPECT_GT(c.residual, 0.1);
}

TEST(DiscreteOracle, Errors) {
  const auto s2 = fx::constant(scalar(2));
  const auto f2 = fx::residues(2);
  EXPECT_EQ(code_of([&] { discrete_spectrum_oracle(s2, 2, f2); }),
            errc::cardinality_mismatch);
  EXPECT_EQ(code_of([&] { discrete_spectrum_oracle(s2, 5, f2); }), errc::cap_exceeded);
}

TEST(DiscreteOracle, AgreesWithTowers) {
  const std::vector<MoranSystem> systems{
      fx::constant(scalar(2)), fx::constant(scalar(4)),
      MoranSystem({Level{scalar(3), fx::D()}}, {Level{mat(4, 2, 2, 4), fx::D(3)}})};
  for (const auto& sys : systems) {
    const auto t = build_tower(sys);
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto r = discrete_spectrum_oracle(sys, n, enumerate_tower(t, n));
      EXPECT_TRUE(r.spectral) << n;
      EXPECT_LT(r.residual, 1e-10);
    }
  }
}

TEST(DiscreteOracle, AtomsOfFirstLevel) {
  const auto atoms = level_atoms(fx::constant(scalar(2)), 1);
  const std::set<RatVec2> want{rv(q(0), q(0)), rv(q(1, 2), q(0)), rv(q(0), q(1, 2)),
                               rv(q(-1, 2), q(-1, 2))};
  EXPECT_EQ(as_set(atoms), want);
}
