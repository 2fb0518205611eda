#pragma once
// Independent long-double references for I_n and K_n.
//   I_n: ascending series sum (x/2)^(n+2k) / (k! (n+k)!).
//   K_n: K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt by the trapezoid rule,
//        which converges geometrically for this analytic, doubly decaying integrand.

#include <cmath>

namespace oracle {

inline long double bessel_i(int n, long double x) {
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= x / (2.0L * k);
  long double sum = term;
  const long double q = x * x / 4.0L;
  for (int k = 1; k < 5000; ++k) {
    term *= q / (static_cast<long double>(k) * (n + k));
    sum += term;
    if (term < 1e-22L * sum) break;
  }
  return sum;
}

inline long double bessel_k(int n, long double x, long double step = 0.005L) {
  // The integrand peaks near t0 = asinh(n / x) and decays like exp(-x cosh t).
  long double sum = 0.5L * std::exp(-x);
  long double peak = sum;
  for (long k = 1;; ++k) {
    const long double t = step * k;
    const long double log_term = -x * std::cosh(t) + n * t;
    const long double term = std::exp(-x * std::cosh(t)) * std::cosh(n * t);
    sum += term;
    peak = std::fmax(peak, term);
    if (t > 1.0L && log_term < std::log(peak) - 60.0L) break;
  }
  return step * sum;
}

}  // namespace oracle
