#pragma once
//
// Modified Bessel functions I_n and K_n of integer order and real positive
// argument, in double precision.
//
//   I_n : power series for moderate x, Hankel asymptotic expansion for large x
//   K_0, K_1 : logarithmic series for x <= 2, Steed's continued fraction
//              (Thompson-Barnett CF2) for x > 2
//   K_n : upward recurrence from K_0, K_1 (stable for K)
//
// Relative accuracy is close to machine precision on [1e-6, 30].
//

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "critspec/errors.hpp"

namespace critspec {

enum class BesselKind { I, K };

struct BesselValue {
  double value = 0.0;
  // K_n(x) underflowed to zero (x beyond roughly 700).
  bool underflow = false;
};

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

inline double bessel_i_series(int n, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= 0.5 * x / k;
  if (term == 0.0) return 0.0;
  double sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

inline double bessel_i_asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  double term = 1.0;
  double sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(term) >= last) break;
    sum += term;
    last = std::abs(term);
    if (last < 1e-17 * std::abs(sum)) break;
  }
  return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * sum;
}

struct K01 {
  double k0;
  double k1;
};

inline K01 bessel_k01_series(double x) {
  const double q = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);
  const double i0 = bessel_i_series(0, x);
  const double i1 = bessel_i_series(1, x);

  // K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} H_k q^k / (k!)^2
  double term = 1.0;
  double harmonic = 0.0;
  double tail0 = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    const double contribution = term * harmonic;
    tail0 += contribution;
    if (contribution < 1e-18 * std::abs(tail0)) break;
  }
  const double k0 = -(log_half + euler_gamma) * i0 + tail0;

  // K_1 = 1/x + ln(x/2) I_1 - (x/4) sum_{k>=0} (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
  term = 1.0;
  harmonic = 0.0;
  double psi_sum = -2.0 * euler_gamma + 1.0;
  double tail1 = psi_sum;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    harmonic += 1.0 / k;
    psi_sum = -2.0 * euler_gamma + 2.0 * harmonic + 1.0 / (k + 1);
    const double contribution = term * psi_sum;
    tail1 += contribution;
    if (std::abs(contribution) < 1e-18 * std::abs(tail1)) break;
  }
  const double k1 = 1.0 / x + log_half * i1 - 0.25 * x * tail1;
  return {k0, k1};
}

inline K01 bessel_k01_continued_fraction(double x) {
  // Steed's algorithm for the CF2 of Thompson and Barnett, order 0.
  constexpr double eps = 1e-17;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

inline void check_bessel_args(int n, double x) {
  if (n < 0) throw invalid_argument("bessel: order must be nonnegative, got " + std::to_string(n));
  if (!(x > 0.0)) throw invalid_argument("bessel: argument must be positive");
}

}  // namespace detail

inline double bessel_i(int n, double x) {
  detail::check_bessel_args(n, x);
  if (x > 30.0 && x > 0.5 * n * n) return detail::bessel_i_asymptotic(n, x);
  return detail::bessel_i_series(n, x);
}

inline double bessel_k(int n, double x) {
  detail::check_bessel_args(n, x);
  const detail::K01 base = x <= 2.0 ? detail::bessel_k01_series(x)
                                     : detail::bessel_k01_continued_fraction(x);
  if (n == 0) return base.k0;
  double prev = base.k0;
  double curr = base.k1;
  for (int k = 1; k < n; ++k) {
    const double next = prev + (2.0 * k / x) * curr;
    prev = curr;
    curr = next;
  }
  return curr;
}

inline BesselValue bessel(BesselKind kind, int n, double x) {
  if (kind == BesselKind::I) return {bessel_i(n, x), false};
  const double v = bessel_k(n, x);
  return {v, v == 0.0};
}

}  // namespace critspec
