#pragma once
//
// Asymptotic coefficients of n_+-(lambda) ~ C_+- / lambda for the radial
// reference symbol |Xi|^(-N/2):
//
//   r_{-d}(xi) = rho(N, d) |xi|^(-d),
//   rho(N, d)  = (2 pi)^(-c) int_{R^c} (1 + |s|^2)^(-N/2) ds,   c = N - d,
//   surface:   C_+- = d^-1 (2 pi)^(-d) |S^(d-1)| rho(N, d) int V_+- dmu,
//   a.c. part: C_+- = N^-1 (2 pi)^(-N) |S^(N-1)| int V_0,+- dX.
//
// The cosphere measure is the standard surface measure of the unit sphere in
// each cotangent fiber.
//

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "critspec/assemble.hpp"
#include "critspec/errors.hpp"
#include "critspec/geometry.hpp"

namespace critspec {

// Surface measure of the unit sphere S^(k-1) in R^k; |S^0| = 2.
inline double unit_sphere_measure(int k) {
  detail::require(k >= 1, "unit_sphere_measure: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

inline double r_symbol_closed_form(int n, int d) {
  detail::require(d >= 1 && d < n, "r_symbol: need 1 <= d < N");
  const int c = n - d;
  return std::pow(2.0 * std::numbers::pi, -c) * std::pow(std::numbers::pi, 0.5 * c) *
         std::tgamma(0.5 * d) / std::tgamma(0.5 * n);
}

// Radial quadrature: int_{R^c} (1+s^2)^(-N/2) ds = |S^(c-1)| int_0^inf s^(c-1) (1+s^2)^(-N/2) ds,
// and with s = tan(theta) the radial integral becomes int_0^(pi/2) sin^(c-1) cos^(d-1).
inline double r_symbol_quadrature(int n, int d) {
  detail::require(d >= 1 && d < n, "r_symbol: need 1 <= d < N");
  const int c = n - d;
  auto integrand = [c, d](double theta) {
    return std::pow(std::sin(theta), c - 1) * std::pow(std::cos(theta), d - 1);
  };
  const double radial = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, 0.5 * std::numbers::pi, 12, 1e-15);
  return std::pow(2.0 * std::numbers::pi, -c) * unit_sphere_measure(c) * radial;
}

struct RSymbol {
  double value = 0.0;
  double closed_form = 0.0;
  double quadrature = 0.0;
  bool agree = false;
};

inline RSymbol r_symbol(int n, int d, double tolerance = 1e-8) {
  RSymbol out;
  out.closed_form = r_symbol_closed_form(n, d);
  out.quadrature = r_symbol_quadrature(n, d);
  out.agree = std::abs(out.closed_form - out.quadrature) <= tolerance * std::abs(out.closed_form);
  if (!out.agree)
    throw internal_error("r_symbol: closed form and quadrature disagree for N=" + std::to_string(n) +
                         ", d=" + std::to_string(d));
  out.value = out.closed_form;
  return out;
}

struct CoefficientPart {
  std::string label;
  double c_plus = 0.0;
  double c_minus = 0.0;
};

struct AsymCoeff {
  double c_plus = 0.0;
  double c_minus = 0.0;
  std::vector<CoefficientPart> breakdown;
};

// Surface contribution from the integrals of V_+ and V_- over a d-dimensional
// surface in R^N.
inline CoefficientPart coefficient_surface_integrals(double int_v_plus, double int_v_minus, int n,
                                                     int d, std::string label = "surface") {
  detail::require(int_v_plus >= 0.0 && int_v_minus >= 0.0,
                  "coefficient_surface: integrals of V_+- must be nonnegative");
  const double factor = std::pow(2.0 * std::numbers::pi, -d) * unit_sphere_measure(d) *
                        r_symbol(n, d).value / d;
  return {std::move(label), factor * int_v_plus, factor * int_v_minus};
}

inline CoefficientPart coefficient_surface(const SurfaceMesh& mesh, const WeightFn& v, int n = 2,
                                           int d = 1) {
  detail::require(mesh.ambient_dim == n && d == 1,
                  "coefficient_surface: meshes are plane curves (N = 2, d = 1)");
  const auto values = v.on(mesh.nodes);
  double plus = 0.0;
  double minus = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    plus += std::max(values[i], 0.0) * mesh.weights[i];
    minus += std::max(-values[i], 0.0) * mesh.weights[i];
  }
  return coefficient_surface_integrals(plus, minus, n, d, "curve n=" + std::to_string(mesh.size()));
}

// Circle of radius R with constant weight c: int V_+- = 2 pi R c_+-.
inline CoefficientPart coefficient_circle(double radius, double weight = 1.0) {
  detail::require(radius > 0.0, "coefficient_circle: radius must be positive");
  const double length = 2.0 * std::numbers::pi * radius;
  return coefficient_surface_integrals(length * std::max(weight, 0.0), length * std::max(-weight, 0.0),
                                       2, 1, "circle R=" + std::to_string(radius));
}

// Absolutely continuous part, from the integrals of V_0,+- over the domain.
inline CoefficientPart coefficient_ac_integrals(double int_v_plus, double int_v_minus, int n,
                                                std::string label = "absolutely-continuous") {
  detail::require(n >= 1, "coefficient_ac: dimension must be >= 1");
  detail::require(int_v_plus >= 0.0 && int_v_minus >= 0.0,
                  "coefficient_ac: integrals of V_0,+- must be nonnegative");
  const double factor = std::pow(2.0 * std::numbers::pi, -n) * unit_sphere_measure(n) / n;
  return {std::move(label), factor * int_v_plus, factor * int_v_minus};
}

inline CoefficientPart coefficient_ac_disk(double radius, double v0, int n = 2) {
  detail::require(radius > 0.0, "coefficient_ac: radius must be positive");
  const double area = std::numbers::pi * radius * radius;
  return coefficient_ac_integrals(area * std::max(v0, 0.0), area * std::max(-v0, 0.0), n,
                                  "disk R=" + std::to_string(radius));
}

inline CoefficientPart coefficient_ac(const AreaGrid& grid, int n = 2) {
  double plus = 0.0;
  double minus = 0.0;
  for (double v : grid.density) {
    plus += std::max(v, 0.0) * grid.cell_area();
    minus += std::max(-v, 0.0) * grid.cell_area();
  }
  return coefficient_ac_integrals(plus, minus, n, "area grid cells=" + std::to_string(grid.size()));
}

inline AsymCoeff coefficient_total(std::span<const CoefficientPart> parts) {
  detail::require(!parts.empty(), "coefficient_total: empty list of contributions");
  AsymCoeff total;
  for (const auto& p : parts) {
    total.c_plus += p.c_plus;
    total.c_minus += p.c_minus;
    total.breakdown.push_back(p);
  }
  return total;
}

}  // namespace critspec
