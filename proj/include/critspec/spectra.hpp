#pragma once
//
// Dense symmetric eigensolution, counting functions and Weyl-coefficient fits.
//

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "critspec/errors.hpp"

namespace critspec {

enum class Sign { plus, minus };

struct Spectrum {
  // lambda_k^+ in descending order
  std::vector<double> positives;
  // lambda_k^- (negative values), descending magnitude
  std::vector<double> negatives;
  std::size_t resolution_n = 0;
  std::size_t trusted_k_max = 0;

  const std::vector<double>& side(Sign s) const { return s == Sign::plus ? positives : negatives; }

  // Splits raw eigenvalues by sign, dropping |lambda| <= zero_threshold.
  static Spectrum from_values(std::span<const double> values, std::size_t resolution_n,
                              double zero_threshold = 0.0) {
    Spectrum s;
    s.resolution_n = resolution_n;
    s.trusted_k_max = resolution_n / 8;
    for (double v : values) {
      if (std::abs(v) <= zero_threshold) continue;
      (v > 0.0 ? s.positives : s.negatives).push_back(v);
    }
    std::sort(s.positives.begin(), s.positives.end(), std::greater<>());
    std::sort(s.negatives.begin(), s.negatives.end());
    return s;
  }
};

struct EigensolveOptions {
  double symmetry_tolerance = 1e-12;
  double zero_threshold = 1e-14;
  // Compute eigenvectors and check residuals on a random sample of eigenpairs.
  bool verify_residuals = true;
  int residual_samples = 10;
  double residual_tolerance = 1e-10;
  std::uint64_t seed = 7;
};

inline Spectrum eigensolve(const Eigen::MatrixXd& m, const EigensolveOptions& options = {}) {
  detail::require(m.rows() == m.cols(), "eigensolve: matrix must be square");
  const std::size_t n = static_cast<std::size_t>(m.rows());
  if (n == 0) return Spectrum::from_values({}, 0);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > options.symmetry_tolerance * scale)
    throw invalid_argument("eigensolve: matrix is not symmetric (max asymmetry " +
                           std::to_string(asym) + ")");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, options.verify_residuals ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw internal_error("eigensolve: iteration did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double norm = ev.cwiseAbs().maxCoeff();

  if (options.verify_residuals && norm > 0.0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, ev.size() - 1);
    for (int s = 0; s < options.residual_samples; ++s) {
      const Eigen::Index k = pick(rng);
      const Eigen::VectorXd vec = solver.eigenvectors().col(k);
      const double residual = (m * vec - ev(k) * vec).norm();
      if (residual > options.residual_tolerance * norm)
        throw internal_error("eigensolve: residual check failed for eigenpair " + std::to_string(k));
    }
  }

  std::vector<double> values(ev.data(), ev.data() + ev.size());
  return Spectrum::from_values(values, n, options.zero_threshold * norm);
}

// #{k : |lambda_k^sign| > lambda}
inline std::size_t counting(const Spectrum& spectrum, double lambda, Sign sign) {
  detail::require(lambda > 0.0, "counting: lambda must be positive");
  const auto& side = spectrum.side(sign);
  // side is sorted by descending magnitude
  auto it = std::partition_point(side.begin(), side.end(),
                                 [lambda](double v) { return std::abs(v) > lambda; });
  return static_cast<std::size_t>(it - side.begin());
}

// Counting function of singular numbers, n_+ + n_-.
inline std::size_t counting_total(const Spectrum& spectrum, double lambda) {
  return counting(spectrum, lambda, Sign::plus) + counting(spectrum, lambda, Sign::minus);
}

struct FitWindow {
  std::size_t k_min = 20;
  std::size_t k_max = 60;
};

struct SideFit {
  bool available = false;
  double coefficient = 0.0;
  // max relative deviation of k |lambda_k| from the coefficient over the window
  double dispersion = 0.0;
  std::size_t samples = 0;
};

struct WeylFit {
  SideFit plus;
  SideFit minus;
  FitWindow window;

  double c_plus() const { return plus.coefficient; }
  double c_minus() const { return minus.coefficient; }
};

namespace detail {

inline double median(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline SideFit fit_side(const std::vector<double>& side, const FitWindow& w) {
  SideFit fit;
  std::vector<double> scaled;
  for (std::size_t k = w.k_min; k <= w.k_max && k <= side.size(); ++k)
    scaled.push_back(static_cast<double>(k) * std::abs(side[k - 1]));
  fit.samples = scaled.size();
  if (scaled.size() < 10) return fit;
  fit.available = true;
  fit.coefficient = median(scaled);
  for (double s : scaled)
    fit.dispersion = std::max(fit.dispersion, std::abs(s - fit.coefficient) / fit.coefficient);
  return fit;
}

}  // namespace detail

// Median of k |lambda_k^+-| over the window, per sign. A sign with fewer than ten
// eigenvalues in the window is reported empty (coefficient 0).
inline WeylFit weyl_fit(const Spectrum& spectrum, const FitWindow& window) {
  detail::require(window.k_min >= 1 && window.k_min <= window.k_max,
                  "weyl_fit: window must satisfy 1 <= k_min <= k_max");
  detail::require(window.k_max <= spectrum.trusted_k_max,
                  "weyl_fit: window exceeds the trusted range k <= n/8 (k_max=" +
                      std::to_string(window.k_max) + ", trusted=" +
                      std::to_string(spectrum.trusted_k_max) + ")");
  WeylFit fit;
  fit.window = window;
  fit.plus = detail::fit_side(spectrum.positives, window);
  fit.minus = detail::fit_side(spectrum.negatives, window);
  if (!fit.plus.available && !fit.minus.available)
    throw insufficient_data("weyl_fit: fewer than 10 eigenvalues of either sign in the window");
  return fit;
}

// Geometric grid of count points from hi down to lo.
inline std::vector<double> geometric_grid(double lo, double hi, int count) {
  detail::require(lo > 0.0 && hi > lo && count >= 2, "geometric_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> grid(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = hi * std::exp(-step * i);
  return grid;
}

}  // namespace critspec
