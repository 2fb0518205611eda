#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "critspec/asymptotics.hpp"

using namespace critspec;

TEST(RSymbol, ClosedFormMatchesQuadrature) {
  for (int n = 2; n <= 6; ++n)
    for (int d = 1; d < n; ++d) {
      const auto r = r_symbol(n, d);
      EXPECT_TRUE(r.agree);
      EXPECT_NEAR(r.quadrature / r.closed_form, 1.0, 1e-8) << n << " " << d;
    }
}

TEST(RSymbol, PlaneCurveValue) {
  // N = 2, d = 1: (2 pi)^-1 sqrt(pi) Gamma(1/2) / Gamma(1) = 1/2
  EXPECT_NEAR(r_symbol_closed_form(2, 1), 0.5, 1e-15);
  // N = 3, d = 2: (2 pi)^-1 sqrt(pi) Gamma(1) / Gamma(3/2) = 1 / pi
  EXPECT_NEAR(r_symbol_closed_form(3, 2), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_THROW(r_symbol(2, 2), invalid_argument);
  EXPECT_THROW(r_symbol(3, 0), invalid_argument);
}

TEST(Coefficients, UnitCircle) {
  EXPECT_NEAR(coefficient_circle(1.0).c_plus, 1.0, 1e-15);
  EXPECT_EQ(coefficient_circle(1.0).c_minus, 0.0);
  EXPECT_NEAR(coefficient_circle(2.0, -1.0).c_minus, 2.0, 1e-15);
}

TEST(Coefficients, SignedAngularWeight) {
  const auto mesh = make_smooth_curve(Circle{}, 512);
  const auto c = coefficient_surface(mesh, WeightFn::angular());
  // the trapezoid rule on the kinked |cos| is only second order
  EXPECT_NEAR(c.c_plus, 1.0 / std::numbers::pi, 1e-5);
  EXPECT_NEAR(c.c_minus, 1.0 / std::numbers::pi, 1e-5);
}

TEST(Coefficients, Homogeneity) {
  const auto mesh = make_polygon_curve(unit_square_vertices(), 16, 3.0);
  const double base = coefficient_surface(mesh, WeightFn::constant(1.0)).c_plus;
  EXPECT_NEAR(base, 4.0 / (2 * std::numbers::pi), 1e-14);
  EXPECT_NEAR(coefficient_surface(mesh, WeightFn::constant(3.5)).c_plus, 3.5 * base, 1e-14);
  const auto neg = coefficient_surface(mesh, WeightFn::constant(-2.0));
  EXPECT_EQ(neg.c_plus, 0.0);
  EXPECT_NEAR(neg.c_minus, 2.0 * base, 1e-14);
}

TEST(Coefficients, AbsolutelyContinuousDisk) {
  EXPECT_NEAR(coefficient_ac_disk(1.0, 1.0).c_plus, 0.25, 1e-15);
  EXPECT_NEAR(coefficient_ac_disk(2.0, 1.0).c_plus, 1.0, 1e-15);
  EXPECT_NEAR(coefficient_ac_disk(1.0, -2.0).c_minus, 0.5, 1e-15);
  EXPECT_THROW(coefficient_ac_disk(0.0, 1.0), invalid_argument);
}

TEST(Coefficients, AreaGridApproachesDisk) {
  const auto grid = make_area_grid(Point2(-1, -1), Point2(1, 1), 1.0 / 64,
                                   [](const Point2& p) { return p.norm() < 1.0 ? 1.0 : 0.0; });
  EXPECT_NEAR(coefficient_ac(grid).c_plus, 0.25, 2e-3);
}

TEST(Coefficients, TotalsAdd) {
  const std::vector<CoefficientPart> mixed{coefficient_ac_disk(1.0, 1.0), coefficient_circle(0.5)};
  EXPECT_NEAR(coefficient_total(mixed).c_plus, 0.75, 1e-15);
  const std::vector<CoefficientPart> circles{coefficient_circle(1.0), coefficient_circle(2.0)};
  const auto total = coefficient_total(circles);
  EXPECT_NEAR(total.c_plus, 3.0, 1e-14);
  EXPECT_EQ(total.breakdown.size(), 2u);
  EXPECT_THROW(coefficient_total(std::vector<CoefficientPart>{}), invalid_argument);
}
