#pragma once
//
// The complementary Young pair
//   Psi(t) = (1 + t) log(1 + t) - t,    Phi(t) = e^t - 1 - t,
// and the averaged Orlicz norm of a weight on an atomized measure,
//
//   ||V||_E = sup { |sum_i w_i V_i g_i| : sum_i w_i Phi(|g_i|) <= mu(E) }.
//
// The supremum is taken by convex duality: the maximizer is
// g_i = sign(V_i) log(1 + |V_i| / tau) with tau > 0 the multiplier that makes
// the constraint active.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "critspec/errors.hpp"
#include "critspec/geometry.hpp"

namespace critspec {

enum class OrliczFunction { psi, phi };

inline double eval_orlicz(OrliczFunction which, double t) {
  if (!(t >= 0.0)) throw invalid_argument("eval_orlicz: argument must be nonnegative");
  if (which == OrliczFunction::psi) {
    if (t < 0.25) {
      // sum_{k>=2} (-1)^k t^k / (k (k-1))
      double power = t * t;
      double sum = 0.0;
      for (int k = 2; k < 60; ++k) {
        const double term = power / (static_cast<double>(k) * (k - 1));
        sum += (k % 2 == 0) ? term : -term;
        if (term < 1e-18 * sum) break;
        power *= t;
      }
      return sum;
    }
    return (1.0 + t) * std::log1p(t) - t;
  }
  if (t < 0.5) {
    // sum_{k>=2} t^k / k!
    double term = 0.5 * t * t;
    double sum = term;
    for (int k = 3; k < 60; ++k) {
      term *= t / k;
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  return std::expm1(t) - t;
}

// s - log(1 + s) = Phi(log(1 + s)), the constraint density at the dual optimum.
namespace detail {
inline double phi_of_log1p(double s) {
  if (s < 0.25) {
    double power = s * s;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      const double term = power / k;
      sum += (k % 2 == 0) ? term : -term;
      if (term < 1e-18 * sum) break;
      power *= s;
    }
    return sum;
  }
  return s - std::log1p(s);
}
}  // namespace detail

struct OrliczNormResult {
  double value = 0.0;
  std::optional<double> multiplier_tau;
  std::vector<double> optimal_g;
  double constraint_residual = 0.0;
};

inline OrliczNormResult averaged_norm(std::span<const double> v, std::span<const double> weights,
                                      double mass_e) {
  detail::require(v.size() == weights.size(), "averaged_norm: values and weights differ in length");
  detail::require(mass_e >= 0.0, "averaged_norm: mass must be nonnegative");
  for (double w : weights) detail::require(w > 0.0, "averaged_norm: weights must be positive");

  OrliczNormResult out;
  out.optimal_g.assign(v.size(), 0.0);
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (mass_e == 0.0 || vmax == 0.0) return out;

  // F(tau) = sum w_i Phi(log(1 + |V_i|/tau)) - mass_e, strictly decreasing in tau.
  auto constraint = [&](double tau) {
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      total += weights[i] * detail::phi_of_log1p(std::abs(v[i]) / tau);
    return total - mass_e;
  };
  // dF/d(log tau) = -sum w_i s_i^2 / (1 + s_i), s_i = |V_i| / tau
  auto slope = [&](double tau) {
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double s = std::abs(v[i]) / tau;
      total += weights[i] * s * s / (1.0 + s);
    }
    return -total;
  };

  double lo = std::log(1e-12 * vmax);
  double hi = std::log(1e12 * vmax);
  if (!(constraint(std::exp(lo)) > 0.0) || !(constraint(std::exp(hi)) < 0.0))
    throw out_of_range("averaged_norm: multiplier outside [1e-12, 1e12] * max|V| (degenerate scaling)");

  // Safeguarded Newton on u = log tau; falls back to bisection when a step leaves
  // the bracket. Stops once the bracket is at the 1e-14 relative level in tau.
  double u = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double tau = std::exp(u);
    const double f = constraint(tau);
    if (f > 0.0) lo = u; else if (f < 0.0) hi = u; else { lo = hi = u; break; }
    if (hi - lo < 1e-14) break;
    const double d = slope(tau);
    double next = (d < 0.0) ? u - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-15 * std::max(1.0, std::abs(u))) {
      u = next;
      break;
    }
    u = next;
  }

  const double tau = std::exp(u);
  double value = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    const double g = std::log1p(a / tau);
    out.optimal_g[i] = v[i] < 0.0 ? -g : g;
    value += weights[i] * a * g;
  }
  out.value = value;
  out.multiplier_tau = tau;
  out.constraint_residual = constraint(tau);
  return out;
}

// Axis-aligned closed cube (square in the plane) of side `side` centered at `center`.
struct Cube {
  Point2 center = Point2::Zero();
  double side = 1.0;

  bool contains(const Point2& p) const {
    const double half = 0.5 * side;
    return std::abs(p.x() - center.x()) <= half && std::abs(p.y() - center.y()) <= half;
  }
};

struct OrliczConfig {
  // Constant in front of the averaged norm in the cube functional J(Q).
  double a2 = 1.0;
};

// J(Q) = A2 ||V||_Q over the atoms inside the closed cube; 0 for an empty intersection.
inline double j_functional(std::span<const double> v, const AtomView& atoms, const Cube& cube,
                           const OrliczConfig& config = {}) {
  detail::require(v.size() == atoms.size(), "j_functional: one weight value per atom required");
  detail::require(cube.side >= 0.0, "j_functional: negative cube side");
  std::vector<double> vr;
  std::vector<double> wr;
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!cube.contains(atoms.points[i])) continue;
    vr.push_back(v[i]);
    wr.push_back(atoms.masses[i]);
    mass += atoms.masses[i];
  }
  if (vr.empty()) return 0.0;
  return config.a2 * averaged_norm(vr, wr, mass).value;
}

// Averaged norm over the whole support.
inline double support_norm(std::span<const double> v, const AtomView& atoms) {
  double mass = 0.0;
  for (double m : atoms.masses) mass += m;
  return averaged_norm(v, atoms.masses, mass).value;
}

}  // namespace critspec
