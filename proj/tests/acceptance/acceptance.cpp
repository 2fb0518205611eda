// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "critspec/critspec.hpp"
#include "oracles/bessel_oracle.hpp"
#include "oracles/roots.hpp"

using namespace critspec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

ExperimentReport run_named(const std::string& name) {
  ExperimentConfig config;
  config.experiment = name;
  return run_experiment(config);
}

const CriterionResult& find(const ExperimentReport& r, const std::string& name) {
  for (const auto& c : r.criteria)
    if (c.name == name) return c;
  throw internal_error("acceptance: report has no criterion '" + name + "'");
}

Spectrum circle_spectrum(int n, const WeightFn& w, const KernelModel& kernel) {
  const auto mesh = make_smooth_curve(Circle{Point2::Zero(), 1.0}, n);
  return eigensolve(assemble_curve_operator(mesh, w, kernel).entries);
}

Outcome bessel_oracle() {
  std::vector<double> xs;
  for (int i = 0; i <= 80; ++i) xs.push_back(1e-4 * std::pow(2e5, i / 80.0));
  std::vector<long double> ref_i, ref_k;
  for (int n = 0; n <= 10; ++n)
    for (double x : xs) {
      ref_i.push_back(oracle::bessel_i(n, x));
      ref_k.push_back(oracle::bessel_k(n, x));
    }
  Clock clock;
  double worst = 0.0;
  std::size_t idx = 0;
  for (int n = 0; n <= 10; ++n)
    for (double x : xs) {
      worst = std::max(worst, std::abs(bessel_i(n, x) / static_cast<double>(ref_i[idx]) - 1.0));
      worst = std::max(worst, std::abs(bessel_k(n, x) / static_cast<double>(ref_k[idx]) - 1.0));
      ++idx;
    }
  const double t = clock.seconds();
  return {worst <= 1e-12 && t < 1.0, fmt("max rel err %.2e (tol 1e-12), %.3f s", worst, t)};
}

Outcome circle_diagonalization() {
  Clock clock;
  const auto s = circle_spectrum(256, WeightFn::constant(1.0), KernelModel::reference());
  std::vector<double> exact;
  for (int m = 0; exact.size() < 20; ++m) {
    const double v = bessel_i(m, 1.0) * bessel_k(m, 1.0);
    exact.push_back(v);
    if (m > 0 && exact.size() < 20) exact.push_back(v);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < 20; ++k) worst = std::max(worst, std::abs(s.positives.at(k) / exact[k] - 1.0));
  const double t = clock.seconds();
  return {worst <= 1e-8 && t < 10.0, fmt("top-20 max rel err %.2e (tol 1e-8), %.2f s", worst, t)};
}

Outcome weyl_coefficient() {
  Clock clock;
  const FitWindow window{20, 60};
  const auto constant = weyl_fit(circle_spectrum(512, WeightFn::constant(1.0), KernelModel::reference()), window);
  const auto signed_fit = weyl_fit(circle_spectrum(512, WeightFn::angular(), KernelModel::reference()), window);
  const double inv_pi = 1.0 / std::numbers::pi;
  const double cp = constant.c_plus();
  const double sp = signed_fit.c_plus() / inv_pi;
  const double sm = signed_fit.c_minus() / inv_pi;
  const double t = clock.seconds();
  const bool ok = cp >= 0.95 && cp <= 1.05 && sp >= 0.9 && sp <= 1.1 && sm >= 0.9 && sm <= 1.1 && t < 60.0;
  return {ok, fmt("c+ = %.5f; cos: c+ pi = %.4f, c- pi = %.4f; %.1f s", cp, sp, sm, t)};
}

Outcome polygon_case() {
  Clock clock;
  const auto mesh = make_polygon_curve(unit_square_vertices(), 256, 3.0);
  const auto s = eigensolve(assemble_curve_operator(mesh, WeightFn::constant(1.0), KernelModel::reference()).entries);
  const double c = weyl_fit(s, FitWindow{20, 60}).c_plus();
  const double expected = 4.0 / (2.0 * std::numbers::pi);
  const double err = std::abs(c / expected - 1.0);
  const double t = clock.seconds();
  return {err <= 0.10 && t < 300.0,
          fmt("n=%.0f c+ = %.5f vs %.5f, rel err %.4f", static_cast<double>(mesh.size()), c, expected, err) +
              fmt(", %.1f s", t)};
}

Outcome coefficient_formulas() {
  Clock clock;
  double worst = 0.0;
  for (int n = 2; n <= 6; ++n)
    for (int d = 1; d < n; ++d) {
      const double a = r_symbol_closed_form(n, d);
      const double b = r_symbol_quadrature(n, d);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
  const double disk = coefficient_ac_disk(1.0, 1.0).c_plus;
  const double t = clock.seconds();
  return {worst <= 1e-8 && std::abs(disk - 0.25) <= 1e-15 && t < 1.0,
          fmt("rho max rel diff %.2e, disk %.17g, %.3f s", worst, disk, t)};
}

Outcome additivity() {
  Clock clock;
  const auto two = run_named("two-surfaces");
  const auto mixed = run_named("mixed-ac-singular");
  const double c2 = find(two, "weyl_c_plus_combined").measured;
  const double cm = find(mixed, "weyl_c_plus_total").measured;
  const double t = clock.seconds();
  const bool ok = std::abs(c2 / 3.0 - 1.0) <= 0.10 && std::abs(cm / 0.75 - 1.0) <= 0.10 && t < 600.0;
  return {ok, fmt("two circles c+ = %.4f vs 3; mixed total = %.4f vs 0.75; %.1f s", c2, cm, t)};
}

Outcome estimate_sharpness() {
  Clock clock;
  const auto r = run_named("cantor-estimate");
  bool ok = true;
  std::string detail;
  for (const char* family : {"circle", "square", "cantor"}) {
    const auto& c = find(r, std::string("estimate_stability_") + family);
    ok = ok && c.pass && std::isfinite(c.measured) && c.measured < 0.25;
    detail += std::string(family) + fmt(" %.2e; ", c.measured);
  }
  return {ok, "variation under refinement: " + detail + fmt("%.1f s", clock.seconds())};
}

Outcome lower_order_decay() {
  Clock clock;
  const auto s = circle_spectrum(512, WeightFn::constant(1.0), KernelModel::lower_order_companion());
  const double at10 = 10.0 * s.positives.at(9);
  const double at40 = 40.0 * s.positives.at(39);
  return {at40 <= 0.5 * at10, fmt("k lambda_k: k=10 %.4e, k=40 %.4e, ratio %.3f; %.1f s", at10, at40,
                                  at40 / at10, clock.seconds())};
}

Outcome covering_law() {
  Clock clock;
  const auto r = run_named("covering-count");
  const auto& uniform = find(r, "count_law_uniform");
  const auto& cantor = find(r, "count_law_cantor");
  const auto& dyadic = find(r, "dyadic_quartering");
  const bool invariants = find(r, "covering_invariants_uniform").pass && find(r, "covering_invariants_cantor").pass;
  const bool ok = uniform.measured <= 2.0 && cantor.measured <= 2.0 && dyadic.measured == 4.0 && invariants;
  return {ok, fmt("max/min of lambda*count: uniform %.3f, cantor %.3f; dyadic cubes %.0f; %.1f s",
                  uniform.measured, cantor.measured, dyadic.measured, clock.seconds())};
}

Outcome orlicz_properties() {
  Clock clock;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0), coord(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 40);
  double homogeneity = 0.0, monotonicity = 0.0, semiadditivity = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    std::vector<Point2> points(n);
    std::vector<double> v(n), w(n);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      points[i] = Point2(coord(rng), coord(rng));
      v[i] = 4 * u(rng);
      w[i] = pos(rng);
      mass += w[i];
    }
    const double base = averaged_norm(v, w, mass).value;
    const double scale = std::max(base, 1e-300);

    const double c = 8 * u(rng);
    std::vector<double> cv(v);
    for (auto& x : cv) x *= c;
    homogeneity = std::max(homogeneity, std::abs(averaged_norm(cv, w, mass).value - std::abs(c) * base) /
                                            std::max(1.0, std::abs(c) * scale));

    std::vector<double> v2(v), w2(w);
    v2.push_back(4 * u(rng));
    w2.push_back(pos(rng));
    monotonicity = std::max(monotonicity, (base - averaged_norm(v2, w2, mass + w2.back()).value) / std::max(1.0, scale));

    // quadrants of the unit square, half-open so each atom lands in exactly one
    double sum = 0.0;
    for (int q = 0; q < 4; ++q) {
      std::vector<double> vq, wq;
      double mq = 0.0;
      for (int i = 0; i < n; ++i) {
        const int qi = (points[i].x() >= 0.5 ? 1 : 0) + (points[i].y() >= 0.5 ? 2 : 0);
        if (qi != q) continue;
        vq.push_back(v[i]);
        wq.push_back(w[i]);
        mq += w[i];
      }
      if (!vq.empty()) sum += averaged_norm(vq, wq, mq).value;
    }
    semiadditivity = std::max(semiadditivity, (sum - base) / std::max(1.0, scale));
  }
  const double t_star = oracle::t_star();
  const std::vector<double> w(7, 0.5);
  double closed = 0.0;
  for (double c : {0.25, 1.0, 3.0}) {
    const std::vector<double> v(7, c);
    closed = std::max(closed, std::abs(averaged_norm(v, w, 3.5).value - c * t_star * 3.5) / c);
  }
  const bool ok = homogeneity <= 1e-9 && monotonicity <= 1e-9 && semiadditivity <= 1e-9 && closed <= 1e-10 &&
                  std::abs(t_star - 1.146193) < 5e-7;
  return {ok, fmt("violations: homogeneity %.1e, monotonicity %.1e, semiadditivity %.1e; closed form %.1e",
                  homogeneity, monotonicity, semiadditivity, closed) +
                  fmt(" (t* = %.12f), %.2f s", t_star, clock.seconds())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 bessel-oracle", bessel_oracle},
      {"2 circle-diagonalization", circle_diagonalization},
      {"3 weyl-coefficient", weyl_coefficient},
      {"4 polygon", polygon_case},
      {"5 coefficient-formulas", coefficient_formulas},
      {"6 additivity", additivity},
      {"7 estimate-sharpness", estimate_sharpness},
      {"8 lower-order-decay", lower_order_decay},
      {"9 covering-law", covering_law},
      {"10 orlicz-properties", orlicz_properties}};
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
