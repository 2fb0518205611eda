#pragma once
//
// Kernel of A A* for the reference operator A = (1 - Laplacian)^(-1/2) in the
// plane, i.e. the Green's function (2 pi)^-1 K_0(|X - Y|) of (1 - Laplacian),
// together with its logarithmic split, self-cell diagonal closures and the
// order -3 companion kernel of (1 - Laplacian)^(-3/2).
//

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "critspec/bessel.hpp"
#include "critspec/errors.hpp"

namespace critspec {

using Point2 = Eigen::Vector2d;

inline constexpr double inv_two_pi = 0.5 / std::numbers::pi;

enum class KernelOrder {
  // order -2 = -N; leading singularity (-1/(2 pi)) log|X-Y|
  reference,
  // order -3 companion, continuous at the diagonal
  lower_order,
};

struct KernelModel {
  int ambient_dim = 2;
  KernelOrder order = KernelOrder::reference;

  static KernelModel reference() { return {}; }
  static KernelModel lower_order_companion() { return {2, KernelOrder::lower_order}; }

  double operator_order() const { return order == KernelOrder::reference ? -2.0 : -3.0; }

  // Coefficient A of log|X - Y| in the kernel.
  double log_coefficient() const { return order == KernelOrder::reference ? -inv_two_pi : 0.0; }

  std::string description() const {
    return order == KernelOrder::reference ? "green(1-laplacian) = K0(r)/(2pi)"
                                           : "green((1-laplacian)^(3/2)) via heat subordination";
  }
};

// Regular part of the reference kernel at r = 0: (2 pi)^-1 (log 2 - gamma).
inline constexpr double reference_regular_limit =
    inv_two_pi * (std::numbers::ln2 - euler_gamma);

namespace detail {

// (1 - Laplacian)^(-3/2) = Gamma(3/2)^-1 int_0^inf t^(1/2) e^(-t) e^(t Laplacian) dt,
// so its kernel is (4 pi Gamma(3/2))^-1 int_0^inf t^(-1/2) exp(-t - r^2/(4t)) dt.
inline double lower_order_radial(double r) {
  static thread_local boost::math::quadrature::exp_sinh<double> integrator;
  const double r2 = r * r;
  auto integrand = [r2](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-t - r2 / (4.0 * t)) / std::sqrt(t);
  };
  const double integral = integrator.integrate(integrand, 1e-12);
  const double gamma_three_halves = 0.5 * std::sqrt(std::numbers::pi);
  return integral / (4.0 * std::numbers::pi * gamma_three_halves);
}

}  // namespace detail

// Kernel as a function of the distance r > 0.
inline double kernel_radial(const KernelModel& kernel, double r) {
  if (!(r > 0.0)) throw singular_point("kernel evaluated at coincident points");
  if (kernel.order == KernelOrder::reference) return inv_two_pi * bessel_k(0, r);
  return detail::lower_order_radial(r);
}

inline double eval_kernel(const KernelModel& kernel, const Point2& x, const Point2& y) {
  if (kernel.ambient_dim != 2) throw invalid_argument("eval_kernel: only N = 2 kernels are available");
  return kernel_radial(kernel, (x - y).norm());
}

// kernel(r) - A log r, continuous up to r = 0.
inline double kernel_regular_part(const KernelModel& kernel, double r) {
  if (r < 0.0) throw invalid_argument("kernel_regular_part: negative distance");
  if (kernel.order == KernelOrder::lower_order) {
    return r == 0.0 ? inv_two_pi : detail::lower_order_radial(r);
  }
  if (r == 0.0) return reference_regular_limit;
  if (r < 1e-3) {
    // K_0(r) + log r = (log 2 - gamma) + (r^2/4)(1 - gamma + log 2 - log r) + O(r^4 log r)
    const double q = 0.25 * r * r;
    const double l = std::numbers::ln2 - euler_gamma - std::log(r);
    return inv_two_pi * ((std::numbers::ln2 - euler_gamma) + q * (1.0 + l) +
                         q * q * (0.25 * l + 0.375));
  }
  return inv_two_pi * (bessel_k(0, r) + std::log(r));
}

// Limit of the kernel at the diagonal for kernels that are continuous there.
inline double kernel_diagonal(const KernelModel& kernel) {
  if (kernel.order == KernelOrder::reference)
    throw singular_point("reference kernel has a logarithmic diagonal singularity");
  return inv_two_pi;
}

enum class CellKind { segment, square };

struct Cell {
  CellKind kind = CellKind::segment;
  double size = 1.0;  // segment length or square side
};

namespace detail {

// Mean of -log|x - y| over pairs of points in the unit square. The difference
// u = x - y has density (1-|u1|)(1-|u2|) on [-1,1]^2; in polar coordinates over
// the triangle 0 <= theta <= pi/4 the radial integral is elementary, leaving an
// adaptive one-dimensional angular quadrature.
inline double unit_square_log_energy() {
  auto radial = [](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double rmax = 1.0 / c;
    const double lr = std::log(rmax);
    // int_0^R r^k (-log r) dr = R^(k+1) (1/(k+1)^2 - log R/(k+1))
    auto moment = [&](int k) {
      const double kp = k + 1.0;
      return std::pow(rmax, kp) * (1.0 / (kp * kp) - lr / kp);
    };
    // (1 - r c)(1 - r s) r = r - (c + s) r^2 + c s r^3
    return moment(1) - (c + s) * moment(2) + c * s * moment(3);
  };
  const double angular = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      radial, 0.0, std::numbers::pi / 4.0, 15, 1e-15);
  return 8.0 * angular;
}

}  // namespace detail

inline double unit_square_log_energy() {
  static const double value = detail::unit_square_log_energy();
  return value;
}

// Mean of the reference kernel over all pairs of points in the cell, using the
// small-argument log split: (2 pi)^-1 (-log h + c_cell + log 2 - gamma) where
// c_cell is the mean of -log|x - y| on the unit cell (3/2 for a segment).
inline double self_cell_coefficient(const Cell& cell) {
  if (!(cell.size > 0.0)) throw invalid_argument("self_cell_coefficient: cell size must be positive");
  const double c_cell = cell.kind == CellKind::segment ? 1.5 : unit_square_log_energy();
  return inv_two_pi * (-std::log(cell.size) + c_cell + std::numbers::ln2 - euler_gamma);
}

// Radial principal symbol |Xi|^(-l) with l = N/2.
struct SymbolModel {
  int ambient_dim = 2;

  double order_l() const { return 0.5 * ambient_dim; }

  double principal(const Eigen::VectorXd& xi) const {
    check(xi);
    return std::pow(xi.norm(), -order_l());
  }

  void check(const Eigen::VectorXd& xi) const {
    if (xi.size() != ambient_dim) throw invalid_argument("symbol: covector dimension mismatch");
    if (!(xi.norm() > 0.0)) throw invalid_argument("symbol: zero covector");
  }
};

// |a_{-l}(Xi)|^2 = |Xi|^(-N).
inline double eval_symbol_sq(const SymbolModel& symbol, const Eigen::VectorXd& xi) {
  symbol.check(xi);
  return std::pow(xi.norm(), -static_cast<double>(symbol.ambient_dim));
}

}  // namespace critspec
