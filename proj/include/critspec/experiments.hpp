#pragma once
//
// Experiment runner behind the command-line tool. A run parses a JSON config,
// executes one experiment, and writes its report and plot data to the output
// directory. Reports are deterministic functions of the config: wall-clock
// time goes to a separate timing.json.
//
// Config schema (every key optional except "experiment"):
//   experiment   name from experiment_names()
//   seed         integer, default 7
//   n            primary resolution (meaning depends on the experiment)
//   window       [k_min, k_max] for Weyl fits, default [20, 60]
//   geometry     experiment-specific object, see the run_* functions
//   weight       {"kind": "constant", "value": c} or
//                {"kind": "angular", "amplitude": a, "frequency": m, "center": [x, y]}
//   tolerances   experiment-specific object of numeric tolerances
//   limits       {"max_matrix_size": 4096, "max_atoms": 65536}
//   output_dir   default "critspec-out"
//

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "critspec/assemble.hpp"
#include "critspec/asymptotics.hpp"
#include "critspec/covering.hpp"
#include "critspec/errors.hpp"
#include "critspec/geometry.hpp"
#include "critspec/hash.hpp"
#include "critspec/io.hpp"
#include "critspec/orlicz.hpp"
#include "critspec/spectra.hpp"

#ifndef CRITSPEC_GIT_HASH
#define CRITSPEC_GIT_HASH "unknown"
#endif

namespace critspec {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "circle-weyl",      "polygon-weyl",      "signed-weight",
      "two-surfaces",     "mixed-ac-singular", "cantor-estimate",
      "covering-count",   "lower-order-decay", "coefficient-table"};
  return names;
}

struct ResourceLimits {
  std::size_t max_matrix_size = 4096;
  std::size_t max_atoms = std::size_t{1} << 16;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 7;
  std::optional<int> n;
  FitWindow window{};
  json geometry = json::object();
  json weight = json::object();
  json tolerances = json::object();
  ResourceLimits limits{};
  std::filesystem::path output_dir = "critspec-out";

  // Canonical JSON echo of the effective config (keys sorted), used for hashing.
  json to_json() const {
    json j = {{"experiment", experiment},
              {"seed", seed},
              {"window", {window.k_min, window.k_max}},
              {"geometry", geometry},
              {"weight", weight},
              {"tolerances", tolerances},
              {"limits", {{"max_matrix_size", limits.max_matrix_size}, {"max_atoms", limits.max_atoms}}}};
    j["n"] = n ? json(*n) : json(nullptr);
    return j;
  }

  std::uint64_t hash() const { return hash_text(to_json().dump()); }
};

namespace detail {

template <class T>
T field(const json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw invalid_argument(std::string("config: field '") + key + "' has the wrong type");
  }
}

inline Point2 point_field(const json& obj, const char* key, const Point2& fallback) {
  const auto v = field<std::vector<double>>(obj, key, {fallback.x(), fallback.y()});
  require(v.size() == 2, std::string("config: field '") + key + "' must be [x, y]");
  return {v[0], v[1]};
}

inline void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (obj.is_null()) return;
  require(obj.is_object(), std::string("config: '") + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw invalid_argument(std::string("config: unknown key '") + key + "' in '" + where + "'");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  using detail::field;
  detail::require(j.is_object(), "config: top level must be a JSON object");
  detail::check_keys(j, "config",
                     {"experiment", "seed", "n", "window", "geometry", "weight", "tolerances", "limits",
                      "output_dir"});
  ExperimentConfig c;
  c.experiment = field<std::string>(j, "experiment", "");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw invalid_argument("config: unknown experiment '" + c.experiment + "'");
  c.seed = field<std::uint64_t>(j, "seed", 7);
  if (j.contains("n") && !j.at("n").is_null()) {
    c.n = field<int>(j, "n", 0);
    detail::require(*c.n > 0, "config: n must be positive");
  }
  const auto w = field<std::vector<std::size_t>>(j, "window", {20, 60});
  detail::require(w.size() == 2 && w[0] >= 1 && w[0] <= w[1], "config: window must be [k_min, k_max]");
  c.window = {w[0], w[1]};
  if (j.contains("geometry")) c.geometry = j.at("geometry");
  if (j.contains("weight")) c.weight = j.at("weight");
  if (j.contains("tolerances")) c.tolerances = j.at("tolerances");
  detail::check_keys(c.geometry, "geometry",
                     {"radius", "center", "vertices", "grading", "panels_per_edge", "radius_2", "gap",
                      "disk_radius", "disk_density", "circle_radius", "circle_center", "cell_size",
                      "curve_nodes", "cantor_depth", "grid_cells", "families", "lambda_min",
                      "lambda_max", "lambda_count", "kappa", "dyadic_cells", "max_dimension",
                      "grid_points"});
  detail::check_keys(c.weight, "weight", {"kind", "value", "amplitude", "frequency", "center"});
  if (!c.tolerances.is_null()) {
    detail::require(c.tolerances.is_object(), "config: 'tolerances' must be an object");
    for (const auto& [key, value] : c.tolerances.items())
      detail::require(value.is_number(), "config: tolerance '" + key + "' must be a number");
  }
  const json limits = j.value("limits", json::object());
  detail::check_keys(limits, "limits", {"max_matrix_size", "max_atoms"});
  c.limits.max_matrix_size = field<std::size_t>(limits, "max_matrix_size", c.limits.max_matrix_size);
  c.limits.max_atoms = field<std::size_t>(limits, "max_atoms", c.limits.max_atoms);
  c.output_dir = field<std::string>(j, "output_dir", "critspec-out");
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

struct CriterionResult {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  json body;
  std::vector<CriterionResult> criteria;
  // file name -> contents, written into the output directory
  std::map<std::string, std::string> artifacts;
  double runtime_seconds = 0.0;

  bool passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
  }
};

namespace detail {

class Run {
 public:
  explicit Run(const ExperimentConfig& config) : config_(config) {}

  const ExperimentConfig& config() const { return config_; }
  const json& geo() const { return config_.geometry; }

  double tol(const char* key, double fallback) const { return field<double>(config_.tolerances, key, fallback); }
  int resolution(int fallback) const { return config_.n.value_or(fallback); }

  void check_size(std::size_t n) const {
    if (n > config_.limits.max_matrix_size)
      throw resource_limit("matrix size " + std::to_string(n) + " exceeds max_matrix_size " +
                           std::to_string(config_.limits.max_matrix_size));
  }

  WeightFn weight(const WeightFn& fallback) const {
    const json& w = config_.weight;
    if (!w.is_object() || w.empty()) return fallback;
    const auto kind = field<std::string>(w, "kind", "constant");
    if (kind == "constant") return WeightFn::constant(field<double>(w, "value", 1.0));
    if (kind == "angular")
      return WeightFn::angular(point_field(w, "center", Point2::Zero()), field<double>(w, "amplitude", 1.0),
                               field<int>(w, "frequency", 1));
    throw invalid_argument("config: unknown weight kind '" + kind + "'");
  }

  Spectrum solve(const OperatorMatrix& m) const {
    EigensolveOptions opts;
    opts.seed = config_.seed;
    return eigensolve(m.entries, opts);
  }

  void criterion(std::string name, double measured, double expected, double tolerance, bool pass,
                 std::string note = {}) {
    report_.criteria.push_back({std::move(name), measured, expected, tolerance, pass, std::move(note)});
  }

  // |measured / expected - 1| <= tolerance
  void relative(std::string name, double measured, double expected, double tolerance) {
    const double err = std::abs(measured / expected - 1.0);
    criterion(std::move(name), measured, expected, tolerance, err <= tolerance);
  }

  void file(const std::string& name, const std::string& contents) { report_.artifacts[name] = contents; }

  void spectrum_files(const std::string& stem, const Spectrum& s) {
    std::ostringstream plus;
    write_spectrum_csv(plus, s, Sign::plus);
    file(stem + "_plus.csv", plus.str());
    if (!s.negatives.empty()) {
      std::ostringstream minus;
      write_spectrum_csv(minus, s, Sign::minus);
      file(stem + "_minus.csv", minus.str());
    }
  }

  void counting_file(const std::string& name, const Spectrum& s, std::span<const double> grid) {
    const auto rows = counting_table(s, grid);
    std::ostringstream os;
    write_counting_csv(os, rows);
    file(name, os.str());
  }

  json& measured() { return report_.body["measured"]; }
  json& expected() { return report_.body["expected"]; }

  ExperimentReport finish() { return std::move(report_); }

 private:
  const ExperimentConfig& config_;
  ExperimentReport report_;
};

// lambda grid over the range resolved by every spectrum: from the largest
// |lambda_{trusted_k_max}| among them up to the smallest |lambda_{k_min}|.
inline std::vector<double> resolved_grid(std::initializer_list<const Spectrum*> spectra, Sign sign,
                                         std::size_t k_min, int count) {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (const Spectrum* s : spectra) {
    const auto& side = s->side(sign);
    require(side.size() >= s->trusted_k_max && s->trusted_k_max > k_min,
            "resolved_grid: spectrum too short for the trusted window");
    lo = std::max(lo, std::abs(side[s->trusted_k_max - 1]));
    hi = std::min(hi, std::abs(side[k_min - 1]));
  }
  require(lo < hi, "resolved_grid: empty resolved window");
  return geometric_grid(lo, hi, count);
}

inline SurfaceMesh circle_mesh(const Run& run, int fallback_nodes) {
  const double radius = field<double>(run.geo(), "radius", 1.0);
  const int n = run.resolution(fallback_nodes);
  run.check_size(static_cast<std::size_t>(n));
  return make_smooth_curve(Circle{point_field(run.geo(), "center", Point2::Zero()), radius}, n);
}

inline double total_norm(std::span<const double> v, std::span<const double> masses) {
  double mass = 0.0;
  for (double m : masses) mass += m;
  return averaged_norm(v, masses, mass).value;
}

// --- experiments ------------------------------------------------------------

// geometry: radius, center. n = nodes (512). Also checks the top eigenvalues
// against R I_m(R) K_m(R) for constant positive weights.
inline void run_circle_weyl(Run& run) {
  const auto mesh = circle_mesh(run, 512);
  const auto weight = run.weight(WeightFn::constant(1.0));
  const auto s = run.solve(assemble_curve_operator(mesh, weight, KernelModel::reference()));
  const auto fit = weyl_fit(s, run.config().window);
  const auto expected = coefficient_surface(mesh, weight);
  run.measured()["fit"] = to_json(fit);
  run.expected()["c_plus"] = expected.c_plus;
  run.expected()["c_minus"] = expected.c_minus;
  run.relative("weyl_c_plus", fit.c_plus(), expected.c_plus, run.tol("weyl_relative", 0.05));
  if (expected.c_minus == 0.0)
    run.criterion("c_minus_side_empty", static_cast<double>(s.negatives.size()), 0.0, 0.0,
                  !fit.minus.available);

  if (const auto* c = std::get_if<ConstantWeight>(&weight.kind()); c && c->value > 0.0) {
    const double radius = field<double>(run.geo(), "radius", 1.0);
    const auto count = static_cast<std::size_t>(run.tol("bessel_eigen_count", 20));
    std::vector<double> exact;
    for (int m = 0; exact.size() < count; ++m) {
      const double value = c->value * radius * bessel_i(m, radius) * bessel_k(m, radius);
      exact.push_back(value);
      if (m > 0 && exact.size() < count) exact.push_back(value);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < count && k < s.positives.size(); ++k)
      worst = std::max(worst, std::abs(s.positives[k] / exact[k] - 1.0));
    const double tolerance = run.tol("bessel_eigen_relative", 1e-8);
    run.criterion("bessel_top_eigenvalues", worst, 0.0, tolerance,
                  s.positives.size() >= count && worst <= tolerance, "max relative error");
  }
  run.spectrum_files("spectrum", s);
  run.counting_file("counting.csv", s, resolved_grid({&s}, Sign::plus, run.config().window.k_min, 200));
}

inline std::vector<Point2> polygon_vertices(const json& geo) {
  if (!geo.contains("vertices")) return unit_square_vertices();
  std::vector<Point2> vertices;
  for (const auto& v : field<std::vector<std::vector<double>>>(geo, "vertices", {})) {
    require(v.size() == 2, "config: each vertex must be [x, y]");
    vertices.emplace_back(v[0], v[1]);
  }
  return vertices;
}

// geometry: vertices (unit square), grading q (3), panels_per_edge (n / edges).
// n = total panels (1024).
inline void run_polygon_weyl(Run& run) {
  const auto vertices = polygon_vertices(run.geo());
  const int edges = static_cast<int>(vertices.size());
  const int per_edge = field<int>(run.geo(), "panels_per_edge", run.resolution(1024) / std::max(edges, 1));
  run.check_size(static_cast<std::size_t>(per_edge) * vertices.size());
  const auto mesh = make_polygon_curve(vertices, per_edge, field<double>(run.geo(), "grading", 3.0));
  const auto weight = run.weight(WeightFn::constant(1.0));
  const auto s = run.solve(assemble_curve_operator(mesh, weight, KernelModel::reference()));
  const auto fit = weyl_fit(s, run.config().window);
  const auto expected = coefficient_surface(mesh, weight);
  run.measured()["fit"] = to_json(fit);
  run.measured()["nodes"] = mesh.size();
  run.expected()["c_plus"] = expected.c_plus;
  run.relative("weyl_c_plus", fit.c_plus(), expected.c_plus, run.tol("weyl_relative", 0.10));
  run.spectrum_files("spectrum", s);
  run.counting_file("counting.csv", s, resolved_grid({&s}, Sign::plus, run.config().window.k_min, 200));
}

// Circle with V = cos(theta): both signs against (2 pi)^-1 int V_+-, and the
// counting functions n_+ and n_- compared across the resolved window.
inline void run_signed_weight(Run& run) {
  const auto mesh = circle_mesh(run, 512);
  const auto weight = run.weight(WeightFn::angular());
  const auto m = assemble_curve_operator(mesh, weight, KernelModel::reference());
  const auto s = run.solve(m);
  const auto fit = weyl_fit(s, run.config().window);
  const auto expected = coefficient_surface(mesh, weight);
  run.measured()["fit"] = to_json(fit);
  run.measured()["signed"] = m.signed_flag;
  run.expected()["c_plus"] = expected.c_plus;
  run.expected()["c_minus"] = expected.c_minus;
  const double tolerance = run.tol("weyl_relative", 0.10);
  run.relative("weyl_c_plus", fit.c_plus(), expected.c_plus, tolerance);
  run.relative("weyl_c_minus", fit.c_minus(), expected.c_minus, tolerance);

  const auto grid = resolved_grid({&s}, Sign::plus, run.config().window.k_min, 200);
  double worst = 0.0;
  for (double lambda : grid)
    worst = std::max(worst, std::abs(static_cast<double>(counting(s, lambda, Sign::plus)) -
                                     static_cast<double>(counting(s, lambda, Sign::minus))));
  const double slack = run.tol("sign_count_difference", 1.0);
  run.criterion("sign_separation", worst, 0.0, slack, worst <= slack, "max |n_+ - n_-|");
  run.spectrum_files("spectrum", s);
  run.counting_file("counting.csv", s, grid);
}

// geometry: radius (1), radius_2 (2), gap between the curves (3). n = nodes on
// the first circle (256); the second gets nodes in proportion to its radius.
inline void run_two_surfaces(Run& run) {
  const double r1 = field<double>(run.geo(), "radius", 1.0);
  const double r2 = field<double>(run.geo(), "radius_2", 2.0);
  const double gap = field<double>(run.geo(), "gap", 3.0);
  require(r1 > 0.0 && r2 > 0.0 && gap > 0.0, "two-surfaces: radii and gap must be positive");
  const int n1 = run.resolution(256);
  const int n2 = 2 * static_cast<int>(std::lround(0.5 * n1 * r2 / r1));
  run.check_size(static_cast<std::size_t>(n1 + n2));
  const auto weight = run.weight(WeightFn::constant(1.0));
  const auto c1 = make_smooth_curve(Circle{Point2::Zero(), r1}, n1);
  const auto c2 = make_smooth_curve(Circle{Point2(r1 + gap + r2, 0.0), r2}, n2);

  const KernelModel kernel = KernelModel::reference();
  const auto s1 = run.solve(assemble_curve_operator(c1, weight, kernel));
  const auto s2 = run.solve(assemble_curve_operator(c2, weight, kernel));
  AreaGrid no_cells;
  no_cells.box_lo = Point2(-r1 - 1.0, -std::max(r1, r2) - 1.0);
  no_cells.box_hi = Point2(r1 + gap + 2.0 * r2 + 1.0, std::max(r1, r2) + 1.0);
  const std::vector<CurveTerm> terms{{c1, weight}, {c2, weight}};
  const auto both = run.solve(assemble_mixed(no_cells, terms, kernel));

  const auto fit = weyl_fit(both, run.config().window);
  const std::vector<CoefficientPart> parts{coefficient_surface(c1, weight), coefficient_surface(c2, weight)};
  const auto expected = coefficient_total(parts);
  run.measured()["fit"] = to_json(fit);
  run.expected()["coefficient"] = to_json(expected);
  run.relative("weyl_c_plus_combined", fit.c_plus(), expected.c_plus, run.tol("weyl_relative", 0.10));

  const auto grid = resolved_grid({&both, &s1, &s2}, Sign::plus, run.config().window.k_min, 200);
  double worst_excess = 0.0;
  for (double lambda : grid) {
    const double n = static_cast<double>(counting(both, lambda, Sign::plus));
    const double sum =
        static_cast<double>(counting(s1, lambda, Sign::plus) + counting(s2, lambda, Sign::plus));
    const double allowed = std::max(run.tol("additivity_absolute", 2.0), run.tol("additivity_relative", 0.1) * n);
    worst_excess = std::max(worst_excess, std::abs(n - sum) - allowed);
  }
  run.criterion("counting_additivity", worst_excess, 0.0, 0.0, worst_excess <= 0.0,
                "max of |n - n_1 - n_2| - max(2, 0.1 n) over the window");
  run.spectrum_files("spectrum_combined", both);
  run.counting_file("counting_combined.csv", both, grid);
  run.counting_file("counting_surface_1.csv", s1, grid);
  run.counting_file("counting_surface_2.csv", s2, grid);
}

// Unit disk with density V_0 plus a circle carrying V, placed side by side in
// one grid box. geometry: disk_radius (1), disk_density (1), circle_radius
// (0.5), circle_center ([2, 0]), cell_size (1/24), curve_nodes (256).
inline void run_mixed(Run& run) {
  const double rd = field<double>(run.geo(), "disk_radius", 1.0);
  const double v0 = field<double>(run.geo(), "disk_density", 1.0);
  const double rc = field<double>(run.geo(), "circle_radius", 0.5);
  const Point2 cc = point_field(run.geo(), "circle_center", Point2(2.0, 0.0));
  const double h = field<double>(run.geo(), "cell_size", 1.0 / 24.0);
  const int nodes = field<int>(run.geo(), "curve_nodes", run.resolution(256));
  require(rd > 0.0 && rc > 0.0 && h > 0.0, "mixed-ac-singular: radii and cell size must be positive");
  const auto estimated_cells = static_cast<std::size_t>(std::numbers::pi * rd * rd / (h * h));
  run.check_size(estimated_cells + static_cast<std::size_t>(nodes));

  const auto weight = run.weight(WeightFn::constant(1.0));
  std::vector<SurfaceMesh> curves{make_smooth_curve(Circle{cc, rc}, nodes)};
  const double reach = std::max(rd, std::max(std::abs(cc.y()) + rc, 0.0)) + 4.0 * h;
  const Point2 lo(std::min(-rd, cc.x() - rc - 4.0 * h), -reach);
  const Point2 hi(std::max(rd, cc.x() + rc + 4.0 * h), reach);
  const auto grid = make_area_grid(lo, hi, h, [&](const Point2& p) { return p.norm() <= rd ? v0 : 0.0; }, curves);
  run.check_size(grid.size() + curves[0].size());
  const std::vector<CurveTerm> terms{{curves[0], weight}};
  const auto s = run.solve(assemble_mixed(grid, terms, KernelModel::reference()));
  const auto fit = weyl_fit(s, run.config().window);

  const std::vector<CoefficientPart> exact{coefficient_ac_disk(rd, v0), coefficient_surface(curves[0], weight)};
  const std::vector<CoefficientPart> discrete{coefficient_ac(grid), coefficient_surface(curves[0], weight)};
  const auto expected = coefficient_total(exact);
  run.measured()["fit"] = to_json(fit);
  run.measured()["cells"] = grid.size();
  run.expected()["coefficient"] = to_json(expected);
  run.expected()["coefficient_on_grid"] = to_json(coefficient_total(discrete));
  run.relative("weyl_c_plus_total", fit.c_plus(), expected.c_plus, run.tol("weyl_relative", 0.10));
  run.spectrum_files("spectrum", s);
  run.counting_file("counting.csv", s, resolved_grid({&s}, Sign::plus, run.config().window.k_min, 200));
}

struct EstimatePair {
  double coarse = 0.0;
  double fine = 0.0;
};

// sup over the coarse operator's resolved window of lambda n(lambda) / ||V||,
// for the coarse and the doubled resolution.
inline EstimatePair estimate_pair(Run& run, const std::string& label, const DiscreteOperator& coarse,
                                  const DiscreteOperator& fine, std::size_t k_min, int points) {
  const auto norm = [](const DiscreteOperator& op) { return total_norm(op.values, op.quad_weights); };
  const auto s1 = run.solve(symmetrize(coarse));
  const auto s2 = run.solve(symmetrize(fine));
  const auto grid = resolved_grid({&s1}, Sign::plus, k_min, points);
  EstimatePair out{empirical_estimate_constant(s1, norm(coarse), grid),
                   empirical_estimate_constant(s2, norm(fine), grid)};
  run.counting_file("counting_" + label + "_coarse.csv", s1, grid);
  run.counting_file("counting_" + label + "_fine.csv", s2, grid);
  return out;
}

// geometry: families (["circle", "square", "cantor"]), cantor_depth (10),
// grid_points (400). n = circle nodes (256); the square uses n/4 panels per
// edge. Each family is solved at n and 2n (Cantor: depth and depth + 1).
inline void run_cantor_estimate(Run& run) {
  const auto families =
      field<std::vector<std::string>>(run.geo(), "families", {"circle", "square", "cantor"});
  const int n = run.resolution(256);
  const int depth = field<int>(run.geo(), "cantor_depth", 10);
  const int points = field<int>(run.geo(), "grid_points", 400);
  const double tolerance = run.tol("stability_relative", 0.25);
  const std::size_t k_min = 1;
  const auto weight = run.weight(WeightFn::constant(1.0));
  const KernelModel kernel = KernelModel::reference();

  for (const auto& family : families) {
    EstimatePair e;
    if (family == "circle") {
      run.check_size(2 * static_cast<std::size_t>(n));
      const double radius = field<double>(run.geo(), "radius", 1.0);
      e = estimate_pair(run, family, discretize_curve(make_smooth_curve(Circle{Point2::Zero(), radius}, n), weight, kernel),
                        discretize_curve(make_smooth_curve(Circle{Point2::Zero(), radius}, 2 * n), weight, kernel),
                        k_min, points);
    } else if (family == "square") {
      run.check_size(2 * static_cast<std::size_t>(n));
      const auto sq = unit_square_vertices();
      const double q = field<double>(run.geo(), "grading", 3.0);
      e = estimate_pair(run, family, discretize_curve(make_polygon_curve(sq, n / 4, q), weight, kernel),
                        discretize_curve(make_polygon_curve(sq, n / 2, q), weight, kernel), k_min, points);
    } else if (family == "cantor") {
      CantorOptions opts{run.config().limits.max_atoms};
      const auto m1 = make_cantor_measure(depth, Point2(0, 0), 1.0, Point2(1, 0), opts);
      const auto m2 = make_cantor_measure(depth + 1, Point2(0, 0), 1.0, Point2(1, 0), opts);
      run.check_size(m2.atoms.size());
      e = estimate_pair(run, family, discretize_measure(m1, weight, kernel),
                        discretize_measure(m2, weight, kernel), k_min, points);
      const auto radii = geometric_radii(0.25, 0.5, 5);
      const auto ahlfors = estimate_ahlfors(m1, radii, 64, run.config().seed);
      run.measured()["cantor_alpha_hat"] = ahlfors.alpha_hat;
      run.expected()["cantor_alpha"] = m1.alpha_nominal;
      run.criterion("cantor_ahlfors_alpha", ahlfors.alpha_hat, m1.alpha_nominal, run.tol("alpha_absolute", 0.05),
                    std::abs(ahlfors.alpha_hat - m1.alpha_nominal) <= run.tol("alpha_absolute", 0.05));
    } else {
      throw invalid_argument("cantor-estimate: unknown family '" + family + "'");
    }
    const double variation = std::abs(e.fine / e.coarse - 1.0);
    run.measured()["estimate_" + family] = {{"coarse", e.coarse}, {"fine", e.fine}, {"variation", variation}};
    run.criterion("estimate_stability_" + family, variation, 0.0, tolerance,
                  std::isfinite(e.coarse) && std::isfinite(e.fine) && variation < tolerance,
                  "relative change of sup lambda n(lambda) / ||V|| under refinement");
  }
}

// geometry: grid_cells (32), cantor_depth (10), lambda_min (0.06), lambda_max
// (0.6), lambda_count (9), kappa (4), dyadic_cells (16).
inline void run_covering_count(Run& run) {
  const int cells = field<int>(run.geo(), "grid_cells", 32);
  const int depth = field<int>(run.geo(), "cantor_depth", 10);
  const double lmin = field<double>(run.geo(), "lambda_min", 0.06);
  const double lmax = field<double>(run.geo(), "lambda_max", 0.6);
  const int count = field<int>(run.geo(), "lambda_count", 9);
  CoveringOptions options;
  options.kappa_config = field<int>(run.geo(), "kappa", 4);
  const double ratio_cap = run.tol("count_ratio", 2.0);
  require(cells >= 1 && count >= 2, "covering-count: need grid_cells >= 1 and lambda_count >= 2");
  if (static_cast<std::size_t>(cells) * cells > run.config().limits.max_atoms)
    throw resource_limit("covering-count: grid exceeds max_atoms");

  const auto lambdas = geometric_grid(lmin, lmax, count);
  const std::vector<std::pair<std::string, SingularMeasure>> measures = {
      {"uniform", make_grid_measure(cells)},
      {"cantor", make_cantor_measure(depth, Point2(0, 0), 1.0, Point2(1, 0), CantorOptions{run.config().limits.max_atoms})}};
  for (const auto& [label, measure] : measures) {
    const auto atoms = atoms_of(measure);
    const std::vector<double> v(measure.atoms.size(), 1.0);
    std::ostringstream records;
    json rows = json::array();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool invariants = true;
    for (double lambda : lambdas) {
      const auto r = build_covering(atoms, v, lambda, options);
      write_covering_record(records, r);
      const double scaled = lambda * static_cast<double>(r.cube_count);
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
      invariants = invariants && r.max_j <= lambda / options.kappa_config + 1e-9 && !r.multiplicity_exceeded;
      json row = to_json(r);
      row["lambda_times_count"] = scaled;
      rows.push_back(row);
    }
    run.file("covering_" + label + ".txt", records.str());
    run.measured()["covering_" + label] = rows;
    run.criterion("count_law_" + label, hi / lo, 1.0, ratio_cap, hi / lo <= ratio_cap,
                  "max / min of lambda |cubes| over the lambda range");
    run.criterion("covering_invariants_" + label, invariants ? 1.0 : 0.0, 1.0, 0.0, invariants,
                  "max_j <= lambda / kappa and multiplicity within cap");
  }

  // Constant weight on a uniform unit-mass square: with target = J(square) / 4
  // the quarters are exactly admissible.
  const auto dyadic = make_grid_measure(field<int>(run.geo(), "dyadic_cells", 16));
  const std::vector<double> ones(dyadic.atoms.size(), 1.0);
  const double global = options.orlicz.a2 * support_norm(ones, atoms_of(dyadic));
  const auto quarters = build_covering(atoms_of(dyadic), ones, options.kappa_config * global / 4.0, options);
  run.criterion("dyadic_quartering", static_cast<double>(quarters.cube_count), 4.0, 0.0, quarters.cube_count == 4);
}

// Companion kernel of order -3 on the circle: k lambda_k must fall by at least
// half between k = 10 and k = 40. n = nodes (512).
inline void run_lower_order(Run& run) {
  const auto mesh = circle_mesh(run, 512);
  const auto weight = run.weight(WeightFn::constant(1.0));
  const auto s = run.solve(assemble_curve_operator(mesh, weight, KernelModel::lower_order_companion()));
  require(s.trusted_k_max >= 40 && s.positives.size() >= 40, "lower-order-decay: need n >= 320 for k = 40");
  const double at10 = 10.0 * s.positives[9];
  const double at40 = 40.0 * s.positives[39];
  run.measured()["k_lambda_k_10"] = at10;
  run.measured()["k_lambda_k_40"] = at40;
  const double cap = run.tol("decay_ratio", 0.5);
  run.criterion("lower_order_decay", at40 / at10, 0.0, cap, at40 / at10 <= cap, "ratio at k=40 to k=10");
  run.spectrum_files("spectrum", s);
}

// geometry: max_dimension (6).
inline void run_coefficient_table(Run& run) {
  const int max_n = field<int>(run.geo(), "max_dimension", 6);
  require(max_n >= 2, "coefficient-table: max_dimension must be >= 2");
  const double tolerance = run.tol("rho_relative", 1e-8);
  std::ostringstream table;
  table.precision(17);
  table << "N,d,closed_form,quadrature,agree\n";
  json rows = json::array();
  double worst = 0.0;
  for (int n = 2; n <= max_n; ++n)
    for (int d = 1; d < n; ++d) {
      const double closed = r_symbol_closed_form(n, d);
      const double quad = r_symbol_quadrature(n, d);
      const double err = std::abs(quad / closed - 1.0);
      worst = std::max(worst, err);
      table << n << ',' << d << ',' << closed << ',' << quad << ',' << (err <= tolerance) << '\n';
      rows.push_back({{"N", n}, {"d", d}, {"closed_form", closed}, {"quadrature", quad}, {"agree", err <= tolerance}});
    }
  run.file("rho_table.csv", table.str());
  run.measured()["rho"] = rows;
  run.criterion("rho_dual_route", worst, 0.0, tolerance, worst <= tolerance, "max relative difference");
  const double disk = coefficient_ac_disk(1.0, 1.0).c_plus;
  run.measured()["ac_unit_disk"] = disk;
  run.expected()["ac_unit_disk"] = 0.25;
  run.criterion("ac_unit_disk", disk, 0.25, run.tol("ac_absolute", 1e-15),
                std::abs(disk - 0.25) <= run.tol("ac_absolute", 1e-15));
}

}  // namespace detail

inline json report_json(const ExperimentConfig& config, const ExperimentReport& report) {
  json j = report.body;
  j["config"] = config.to_json();
  j["config_hash"] = hex_digest(config.hash());
  j["git_hash"] = CRITSPEC_GIT_HASH;
  json criteria = json::array();
  for (const auto& c : report.criteria)
    criteria.push_back({{"name", c.name},
                        {"measured", c.measured},
                        {"expected", c.expected},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass},
                        {"detail", c.detail}});
  j["criteria"] = criteria;
  j["passed"] = report.passed();
  return j;
}

// Runs the experiment in memory; nothing touches the filesystem.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  using Fn = void (*)(detail::Run&);
  static const std::map<std::string, Fn> table = {
      {"circle-weyl", detail::run_circle_weyl},
      {"polygon-weyl", detail::run_polygon_weyl},
      {"signed-weight", detail::run_signed_weight},
      {"two-surfaces", detail::run_two_surfaces},
      {"mixed-ac-singular", detail::run_mixed},
      {"cantor-estimate", detail::run_cantor_estimate},
      {"covering-count", detail::run_covering_count},
      {"lower-order-decay", detail::run_lower_order},
      {"coefficient-table", detail::run_coefficient_table}};
  const auto it = table.find(config.experiment);
  if (it == table.end()) throw invalid_argument("unknown experiment '" + config.experiment + "'");
  const auto start = std::chrono::steady_clock::now();
  detail::Run run(config);
  run.measured() = json::object();
  run.expected() = json::object();
  it->second(run);
  auto report = run.finish();
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// Writes the artifacts, then report.json, then timing.json.
inline void write_report(const ExperimentConfig& config, const ExperimentReport& report) {
  std::filesystem::create_directories(config.output_dir);
  for (const auto& [name, contents] : report.artifacts) write_atomically(config.output_dir / name, contents);
  write_atomically(config.output_dir / "report.json", report_json(config, report).dump(2) + "\n");
  const json timing = {{"experiment", config.experiment}, {"runtime_seconds", report.runtime_seconds}};
  write_atomically(config.output_dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace critspec
