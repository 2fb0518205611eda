#pragma once
//
// Cube coverings driven by the averaged-norm functional J(Q) = A2 ||V||_Q.
//
// For a center X, rho_X(t) = J(Q_X(t)) is a nondecreasing step function of the
// side t; its jumps sit at t = 2 |x_i - X|_inf. A covering for level lambda uses,
// around each selected center, the largest cube with J <= lambda / kappa, and
// selects centers greedily (largest mass first, then largest admissible cube,
// then lowest index) until every atom is covered.
//

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "critspec/errors.hpp"
#include "critspec/geometry.hpp"
#include "critspec/orlicz.hpp"
#include "critspec/spectra.hpp"

namespace critspec {

inline double chebyshev_distance(const Point2& a, const Point2& b) {
  return std::max(std::abs(a.x() - b.x()), std::abs(a.y() - b.y()));
}

inline double rho(const AtomView& atoms, std::span<const double> v, const Point2& center, double t,
                  const OrliczConfig& config = {}) {
  detail::require(t >= 0.0, "rho: cube side must be nonnegative");
  return j_functional(v, atoms, Cube{center, t}, config);
}

namespace detail {

// rho_X evaluated at its breakpoints: sides[k] = 2 * (k-th distinct Chebyshev
// distance), values[k] = rho_X(sides[k]).
class RhoProfile {
 public:
  RhoProfile(const AtomView& atoms, std::span<const double> v, const Point2& center,
             const OrliczConfig& config)
      : v_(v), atoms_(atoms), config_(config) {
    order_.resize(atoms.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    dist_.resize(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
      dist_[i] = chebyshev_distance(atoms.points[i], center);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return dist_[a] < dist_[b]; });
    for (std::size_t k = 0; k < order_.size(); ++k) {
      const double d = dist_[order_[k]];
      if (k + 1 == order_.size() || dist_[order_[k + 1]] != d) {
        sides_.push_back(2.0 * d);
        prefix_end_.push_back(k + 1);
      }
    }
    values_.assign(sides_.size(), -1.0);
  }

  std::size_t breakpoints() const { return sides_.size(); }
  double side(std::size_t k) const { return sides_[k]; }
  std::size_t atoms_within(std::size_t k) const { return prefix_end_[k]; }

  double value(std::size_t k) {
    if (values_[k] >= 0.0) return values_[k];
    std::vector<double> vr;
    std::vector<double> wr;
    double mass = 0.0;
    const std::size_t end = prefix_end_[k];
    vr.reserve(end);
    wr.reserve(end);
    for (std::size_t j = 0; j < end; ++j) {
      const std::size_t i = order_[j];
      vr.push_back(v_[i]);
      wr.push_back(atoms_.masses[i]);
      mass += atoms_.masses[i];
    }
    values_[k] = config_.a2 * averaged_norm(vr, wr, mass).value;
    return values_[k];
  }

  double limit() { return value(sides_.size() - 1); }

  // Smallest breakpoint index with value >= target (values are nondecreasing).
  std::size_t first_reaching(double target) {
    std::size_t lo = 0;
    std::size_t hi = sides_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (value(mid) >= target) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

 private:
  std::span<const double> v_;
  AtomView atoms_;
  OrliczConfig config_;
  std::vector<std::size_t> order_;
  std::vector<double> dist_;
  std::vector<double> sides_;
  std::vector<std::size_t> prefix_end_;
  std::vector<double> values_;
};

}  // namespace detail

// Smallest side t with rho_X(t) >= target. Sides are exact breakpoints of the
// atomized step function; 0 means the cube degenerates to its center atom.
inline double solve_t(const AtomView& atoms, std::span<const double> v, const Point2& center,
                      double target, const OrliczConfig& config = {}) {
  detail::require(v.size() == atoms.size(), "solve_t: one weight value per atom required");
  detail::require(atoms.size() > 0, "solve_t: empty measure");
  detail::require(target > 0.0, "solve_t: target must be positive");
  detail::RhoProfile profile(atoms, v, center, config);
  if (target >= profile.limit())
    throw out_of_range("solve_t: target is not below the saturation value rho_infinity");
  return profile.side(profile.first_reaching(target));
}

struct CoveringCube {
  Point2 center = Point2::Zero();
  double side = 0.0;
  std::size_t atoms_inside = 0;
  double j_value = 0.0;
};

struct CoveringOptions {
  int kappa_config = 4;
  int multiplicity_cap = 16;
  OrliczConfig orlicz{};
  // Polynomial degree bound l of the piecewise polynomial construction.
  int order_l = 1;
  int ambient_dim = 2;
};

struct CoveringReport {
  double lambda = 0.0;
  std::vector<CoveringCube> cubes;
  int family_count = 0;
  int multiplicity_observed = 0;
  std::size_t cube_count = 0;
  double max_j = 0.0;
  double rho_infinity = 0.0;
  double bound_value = 0.0;
  bool multiplicity_exceeded = false;
  // Some center atom alone carries J above lambda / kappa.
  bool threshold_violated = false;
};

// Number of polynomials of degree < l in N variables, binom(N + l - 1, N).
inline long polynomial_space_dim(int ambient_dim, int order_l) {
  detail::require(ambient_dim >= 1 && order_l >= 1, "polynomial_space_dim: need N >= 1 and l >= 1");
  long result = 1;
  for (int i = 1; i <= ambient_dim; ++i) result = result * (order_l - 1 + i) / i;
  return result;
}

inline CoveringReport build_covering(const AtomView& atoms, std::span<const double> v, double lambda,
                                     const CoveringOptions& options = {}) {
  detail::require(v.size() == atoms.size(), "build_covering: one weight value per atom required");
  detail::require(atoms.size() > 0, "build_covering: empty measure");
  detail::require(lambda > 0.0, "build_covering: lambda must be positive");
  detail::require(options.kappa_config >= 1, "build_covering: kappa must be >= 1");

  CoveringReport report;
  report.lambda = lambda;
  const std::size_t n = atoms.size();
  const double target = lambda / options.kappa_config;
  const double tol = 1e-10 * target;
  report.rho_infinity = options.orlicz.a2 * support_norm(v, atoms);

  if (target >= report.rho_infinity) {
    Point2 lo = atoms.points[0];
    Point2 hi = atoms.points[0];
    for (const auto& p : atoms.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    // side from the rounded center so that every atom passes the closed-cube test
    const Point2 center = 0.5 * (lo + hi);
    double reach = 0.0;
    for (const auto& p : atoms.points) reach = std::max(reach, chebyshev_distance(p, center));
    CoveringCube cube{center, 2.0 * reach, n, report.rho_infinity};
    report.cubes.push_back(cube);
  } else {
    // Largest admissible cube around every atom.
    std::vector<double> side(n, 0.0);
    std::vector<double> jval(n, 0.0);
    std::vector<bool> exceeds(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      detail::RhoProfile profile(atoms, v, atoms.points[i], options.orlicz);
      const std::size_t k = profile.first_reaching(target);
      std::size_t chosen = k;
      if (profile.value(k) > target + tol) {
        if (k == 0) {
          exceeds[i] = true;
        } else {
          chosen = k - 1;
        }
      }
      side[i] = profile.side(chosen);
      jval[i] = profile.value(chosen);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (atoms.masses[a] != atoms.masses[b]) return atoms.masses[a] > atoms.masses[b];
      return side[a] > side[b];
    });

    std::vector<bool> covered(n, false);
    for (std::size_t i : order) {
      if (covered[i]) continue;
      const Cube cube{atoms.points[i], side[i]};
      std::size_t inside = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (cube.contains(atoms.points[j])) {
          covered[j] = true;
          ++inside;
        }
      report.cubes.push_back({atoms.points[i], side[i], inside, jval[i]});
      if (exceeds[i]) report.threshold_violated = true;
    }
  }

  report.cube_count = report.cubes.size();
  for (const auto& c : report.cubes) report.max_j = std::max(report.max_j, c.j_value);

  for (std::size_t j = 0; j < n; ++j) {
    int count = 0;
    for (const auto& c : report.cubes)
      if (Cube{c.center, c.side}.contains(atoms.points[j])) ++count;
    if (count == 0) throw internal_error("build_covering: atom left uncovered");
    report.multiplicity_observed = std::max(report.multiplicity_observed, count);
  }
  report.multiplicity_exceeded = report.multiplicity_observed > options.multiplicity_cap;

  // Split into families of pairwise disjoint cubes by greedy coloring.
  std::vector<int> color(report.cubes.size(), -1);
  for (std::size_t a = 0; a < report.cubes.size(); ++a) {
    std::vector<bool> used;
    for (std::size_t b = 0; b < a; ++b) {
      const auto& ca = report.cubes[a];
      const auto& cb = report.cubes[b];
      const double reach = 0.5 * (ca.side + cb.side);
      if (chebyshev_distance(ca.center, cb.center) <= reach) {
        if (used.size() <= static_cast<std::size_t>(color[b])) used.resize(color[b] + 1, false);
        used[color[b]] = true;
      }
    }
    int c = 0;
    while (static_cast<std::size_t>(c) < used.size() && used[c]) ++c;
    color[a] = c;
    report.family_count = std::max(report.family_count, c + 1);
  }

  report.bound_value = static_cast<double>(report.cube_count) *
                       polynomial_space_dim(options.ambient_dim, options.order_l);
  return report;
}

// One line per cube: center_x center_y side atoms_inside.
inline void write_covering_record(std::ostream& os, const CoveringReport& report) {
  os.precision(17);
  os << "# covering lambda=" << report.lambda << " cubes=" << report.cube_count
     << " multiplicity=" << report.multiplicity_observed << " families=" << report.family_count
     << " max_j=" << report.max_j << " bound=" << report.bound_value << "\n";
  os << "# center_x center_y side atoms_inside\n";
  for (const auto& c : report.cubes)
    os << c.center.x() << ' ' << c.center.y() << ' ' << c.side << ' ' << c.atoms_inside << '\n';
}

// Measured constant of n(lambda) <= C ||V|| / lambda: sup over the grid of
// lambda n(lambda) / ||V||, with n counting singular numbers.
inline double empirical_estimate_constant(const Spectrum& spectrum, double v_norm,
                                          std::span<const double> lambda_grid) {
  detail::require(v_norm > 0.0, "empirical_estimate_constant: norm must be positive");
  detail::require(!lambda_grid.empty(), "empirical_estimate_constant: empty lambda grid");
  detail::require(!spectrum.positives.empty() || !spectrum.negatives.empty(),
                  "empirical_estimate_constant: empty spectrum");
  double sup = 0.0;
  for (double lambda : lambda_grid)
    sup = std::max(sup, lambda * static_cast<double>(counting_total(spectrum, lambda)));
  return sup / v_norm;
}

}  // namespace critspec
