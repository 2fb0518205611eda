#include <cmath>

#include <gtest/gtest.h>

#include "critspec/covering.hpp"
#include "oracles/roots.hpp"

using namespace critspec;

namespace {

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

TEST(Rho, SingleAtomCube) {
  const auto m = make_grid_measure(4);
  const auto v = ones(m.atoms.size());
  // a degenerate cube holds only its center atom: mass t* / 16
  EXPECT_NEAR(rho(atoms_of(m), v, m.atoms[5], 0.0), oracle::t_star() / 16.0, 1e-12);
  EXPECT_EQ(rho(atoms_of(m), v, Point2(10, 10), 1.0), 0.0);
  EXPECT_THROW(rho(atoms_of(m), v, m.atoms[0], -1.0), invalid_argument);
}

TEST(Rho, NondecreasingInSide) {
  const auto m = make_cantor_measure(6);
  const auto v = ones(m.atoms.size());
  double prev = 0.0;
  for (double t = 0.0; t < 1.5; t += 0.01) {
    const double r = rho(atoms_of(m), v, Point2(0.4, 0.0), t);
    EXPECT_GE(r, prev - 1e-15);
    prev = r;
  }
  EXPECT_NEAR(prev, oracle::t_star(), 1e-10);
}

TEST(SolveT, ReturnsExactBreakpoint) {
  const auto m = make_grid_measure(8);
  const auto atoms = atoms_of(m);
  const auto v = ones(m.atoms.size());
  const Point2 center = m.atoms[27];
  for (double target : {0.01, 0.1, 0.4, 0.9}) {
    const double t = solve_t(atoms, v, center, target);
    EXPECT_GE(rho(atoms, v, center, t), target);
    // just below the breakpoint the next ring of atoms is lost
    if (t > 0.0) {
      EXPECT_LT(rho(atoms, v, center, t * (1 - 1e-9)), target);
    }
    // breakpoints are twice a Chebyshev distance to an atom
    bool on_grid = t == 0.0;
    for (const auto& p : m.atoms) on_grid = on_grid || std::abs(2 * chebyshev_distance(p, center) - t) < 1e-14;
    EXPECT_TRUE(on_grid) << t;
  }
}

TEST(SolveT, TargetAboveSaturation) {
  const auto m = make_grid_measure(4);
  const auto v = ones(m.atoms.size());
  EXPECT_THROW(solve_t(atoms_of(m), v, m.atoms[0], 2.0), out_of_range);
  EXPECT_THROW(solve_t(atoms_of(m), v, m.atoms[0], 0.0), invalid_argument);
}

TEST(Covering, DyadicQuartering) {
  const auto m = make_grid_measure(16);
  const auto v = ones(m.atoms.size());
  const double global = support_norm(v, atoms_of(m));
  const auto r = build_covering(atoms_of(m), v, global, CoveringOptions{});
  EXPECT_EQ(r.cube_count, 4u);
  for (const auto& c : r.cubes) EXPECT_EQ(c.atoms_inside, 64u);
  EXPECT_EQ(r.multiplicity_observed, 1);
  EXPECT_EQ(r.family_count, 1);
}

TEST(Covering, SingleCubeWhenTargetSaturates) {
  const auto m = make_cantor_measure(5);
  const auto v = ones(m.atoms.size());
  const auto r = build_covering(atoms_of(m), v, 100.0);
  ASSERT_EQ(r.cube_count, 1u);
  EXPECT_EQ(r.cubes[0].atoms_inside, m.atoms.size());
  EXPECT_NEAR(r.max_j, r.rho_infinity, 1e-15);
}

TEST(Covering, Invariants) {
  for (int which = 0; which < 2; ++which) {
    const auto m = which == 0 ? make_grid_measure(16) : make_cantor_measure(8);
    const auto v = ones(m.atoms.size());
    for (double lambda : {0.05, 0.2, 0.8}) {
      const auto r = build_covering(atoms_of(m), v, lambda);
      EXPECT_LE(r.max_j, lambda / 4 + 1e-12);
      EXPECT_FALSE(r.threshold_violated);
      EXPECT_FALSE(r.multiplicity_exceeded);
      EXPECT_LE(r.family_count, r.multiplicity_observed > 0 ? 16 : 0);
      EXPECT_EQ(r.bound_value, static_cast<double>(r.cube_count));
      for (const auto& c : r.cubes) EXPECT_DOUBLE_EQ(c.j_value, rho(atoms_of(m), v, c.center, c.side));
    }
  }
}

TEST(Covering, CountScalesInverselyWithLambda) {
  const auto m = make_grid_measure(32);
  const auto v = ones(m.atoms.size());
  double lo = 1e300, hi = 0.0;
  for (double lambda : geometric_grid(0.06, 0.6, 5)) {
    const double scaled = lambda * static_cast<double>(build_covering(atoms_of(m), v, lambda).cube_count);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  EXPECT_LE(hi / lo, 2.0);
}

TEST(Covering, ThresholdViolationFlagged) {
  // one heavy atom whose J alone exceeds lambda / kappa
  const std::vector<Point2> points{Point2(0, 0), Point2(1, 0)};
  const std::vector<double> masses{1.0, 1.0};
  const std::vector<double> v{10.0, 0.01};
  const auto r = build_covering(AtomView{points, masses}, v, 1.0);
  EXPECT_TRUE(r.threshold_violated);
}

TEST(Covering, Errors) {
  const auto m = make_grid_measure(2);
  EXPECT_THROW(build_covering(atoms_of(m), ones(3), 1.0), invalid_argument);
  EXPECT_THROW(build_covering(atoms_of(m), ones(4), 0.0), invalid_argument);
  CoveringOptions bad;
  bad.kappa_config = 0;
  EXPECT_THROW(build_covering(atoms_of(m), ones(4), 1.0, bad), invalid_argument);
}

TEST(Covering, PolynomialSpaceDimension) {
  EXPECT_EQ(polynomial_space_dim(2, 1), 1);
  EXPECT_EQ(polynomial_space_dim(2, 2), 3);
  EXPECT_EQ(polynomial_space_dim(3, 3), 10);
}

TEST(EstimateConstant, HarmonicSpectrum) {
  std::vector<double> values;
  for (int k = 1; k <= 200; ++k) values.push_back(1.0 / k);
  const auto s = Spectrum::from_values(values, 1600);
  const auto grid = geometric_grid(0.01, 0.9, 400);
  const double c = empirical_estimate_constant(s, 1.0, grid);
  EXPECT_LE(c, 1.0);
  EXPECT_GE(c, 0.95);
  EXPECT_NEAR(empirical_estimate_constant(s, 2.0, grid), 0.5 * c, 1e-15);
  EXPECT_THROW(empirical_estimate_constant(s, 0.0, grid), invalid_argument);
}
