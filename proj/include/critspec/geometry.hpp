#pragma once
//
// Plane curves and atomized measures: smooth closed curves with uniform
// parametrization, graded polygon meshes, Cantor-type measures, uniform grid
// measures; empirical Ahlfors regularity estimation and generic orthonormal
// bases avoiding a finite family of proper subspaces.
//

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "critspec/errors.hpp"
#include "critspec/kernels.hpp"

namespace critspec {

enum class MeshKind { smooth_closed, polygon };

// Discretized closed curve carrying the quadrature weights of its arclength
// measure. For smooth curves nodes are equispaced in the parameter t in
// [0, 2 pi) and weight = |x'(t)| * 2 pi / n. For polygons each node is a panel
// midpoint and its weight is the panel length.
struct SurfaceMesh {
  int ambient_dim = 2;
  MeshKind kind = MeshKind::smooth_closed;
  std::vector<Point2> nodes;
  std::vector<double> weights;
  std::vector<Point2> tangents;
  std::vector<double> param_values;
  std::vector<std::size_t> corner_indices;

  std::size_t size() const { return nodes.size(); }

  double total_measure() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

// Atomized measure: atom i stands for a cell of size cell_size carrying masses[i].
struct SingularMeasure {
  int ambient_dim = 2;
  std::vector<Point2> atoms;
  std::vector<double> masses;
  double cell_size = 1.0;
  CellKind cell_kind = CellKind::segment;
  double alpha_nominal = 1.0;

  std::size_t size() const { return atoms.size(); }

  double total_mass() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }
};

// Non-owning view of weighted points; both meshes and measures reduce to it.
struct AtomView {
  std::span<const Point2> points;
  std::span<const double> masses;

  std::size_t size() const { return points.size(); }
};

inline AtomView atoms_of(const SurfaceMesh& mesh) { return {mesh.nodes, mesh.weights}; }
inline AtomView atoms_of(const SingularMeasure& measure) { return {measure.atoms, measure.masses}; }

// --- smooth curves ----------------------------------------------------------

struct Circle {
  Point2 center = Point2::Zero();
  double radius = 1.0;
};

struct Ellipse {
  Point2 center = Point2::Zero();
  double a = 1.0;
  double b = 1.0;
};

// r(t) = radius (1 + amplitude cos(lobes t)).
struct Star {
  Point2 center = Point2::Zero();
  double radius = 1.0;
  double amplitude = 0.2;
  int lobes = 5;
};

using SmoothShape = std::variant<Circle, Ellipse, Star>;

namespace detail {

struct CurveSample {
  Point2 point;
  Point2 derivative;
};

inline CurveSample sample(const Circle& c, double t) {
  return {c.center + c.radius * Point2(std::cos(t), std::sin(t)),
          c.radius * Point2(-std::sin(t), std::cos(t))};
}

inline CurveSample sample(const Ellipse& e, double t) {
  return {e.center + Point2(e.a * std::cos(t), e.b * std::sin(t)),
          Point2(-e.a * std::sin(t), e.b * std::cos(t))};
}

inline CurveSample sample(const Star& s, double t) {
  const double r = s.radius * (1.0 + s.amplitude * std::cos(s.lobes * t));
  const double dr = -s.radius * s.amplitude * s.lobes * std::sin(s.lobes * t);
  const Point2 dir(std::cos(t), std::sin(t));
  const Point2 perp(-std::sin(t), std::cos(t));
  return {s.center + r * dir, dr * dir + r * perp};
}

inline void validate(const Circle& c) {
  require(c.radius > 0.0, "circle radius must be positive");
}
inline void validate(const Ellipse& e) {
  require(e.a > 0.0 && e.b > 0.0, "ellipse semi-axes must be positive");
}
inline void validate(const Star& s) {
  require(s.radius > 0.0, "star radius must be positive");
  require(std::abs(s.amplitude) < 1.0, "star amplitude must satisfy |amplitude| < 1");
  require(s.lobes >= 1, "star needs at least one lobe");
}

}  // namespace detail

inline SurfaceMesh make_smooth_curve(const SmoothShape& shape, int n_nodes) {
  if (n_nodes < 8 || n_nodes % 2 != 0)
    throw invalid_argument("make_smooth_curve: n_nodes must be even and >= 8, got " +
                           std::to_string(n_nodes));
  std::visit([](const auto& s) { detail::validate(s); }, shape);

  SurfaceMesh mesh;
  mesh.kind = MeshKind::smooth_closed;
  const double h = 2.0 * std::numbers::pi / n_nodes;
  mesh.nodes.reserve(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    const double t = h * j;
    const auto s = std::visit([t](const auto& shp) { return detail::sample(shp, t); }, shape);
    const double speed = s.derivative.norm();
    mesh.nodes.push_back(s.point);
    mesh.weights.push_back(speed * h);
    mesh.tangents.push_back(s.derivative / speed);
    mesh.param_values.push_back(t);
  }
  return mesh;
}

// --- polygons ---------------------------------------------------------------

namespace detail {

// Grading map on [0,1], symmetric about 1/2, clustering toward both ends.
inline double graded(double u, double q) {
  if (u <= 0.5) return 0.5 * std::pow(2.0 * u, q);
  return 1.0 - 0.5 * std::pow(2.0 * (1.0 - u), q);
}

inline double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace detail

inline SurfaceMesh make_polygon_curve(std::span<const Point2> vertices, int panels_per_edge,
                                      double grading_exponent = 3.0) {
  const std::size_t nv = vertices.size();
  detail::require(nv >= 3, "make_polygon_curve: need at least 3 vertices");
  detail::require(panels_per_edge >= 2 && panels_per_edge % 2 == 0,
                  "make_polygon_curve: panels_per_edge must be even and >= 2");
  detail::require(grading_exponent >= 1.0, "make_polygon_curve: grading exponent must be >= 1");
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = i + 1; j < nv; ++j)
      detail::require((vertices[i] - vertices[j]).norm() > 0.0,
                      "make_polygon_curve: repeated vertex");
  for (std::size_t i = 0; i < nv; ++i) {
    const Point2& prev = vertices[(i + nv - 1) % nv];
    const Point2& curr = vertices[i];
    const Point2& next = vertices[(i + 1) % nv];
    const Point2 a = curr - prev;
    const Point2 b = next - curr;
    detail::require(std::abs(detail::cross(a, b)) > 1e-12 * a.norm() * b.norm(),
                    "make_polygon_curve: collinear consecutive vertices");
  }

  SurfaceMesh mesh;
  mesh.kind = MeshKind::polygon;
  double arclength = 0.0;
  for (std::size_t e = 0; e < nv; ++e) {
    const Point2& p0 = vertices[e];
    const Point2& p1 = vertices[(e + 1) % nv];
    const Point2 edge = p1 - p0;
    const double length = edge.norm();
    const Point2 tangent = edge / length;
    for (int k = 0; k < panels_per_edge; ++k) {
      const double s0 = detail::graded(static_cast<double>(k) / panels_per_edge, grading_exponent);
      const double s1 =
          detail::graded(static_cast<double>(k + 1) / panels_per_edge, grading_exponent);
      const double mid = 0.5 * (s0 + s1);
      if (k == 0 || k == panels_per_edge - 1) mesh.corner_indices.push_back(mesh.nodes.size());
      mesh.nodes.push_back(p0 + mid * edge);
      mesh.weights.push_back((s1 - s0) * length);
      mesh.tangents.push_back(tangent);
      mesh.param_values.push_back(arclength + mid * length);
    }
    arclength += length;
  }
  return mesh;
}

inline std::vector<Point2> unit_square_vertices() {
  return {Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)};
}

// Rotation by angle about the origin followed by translation.
inline SurfaceMesh transformed(const SurfaceMesh& mesh, double angle, const Point2& shift) {
  const Eigen::Rotation2Dd rot(angle);
  SurfaceMesh out = mesh;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    out.nodes[i] = rot * mesh.nodes[i] + shift;
    out.tangents[i] = rot * mesh.tangents[i];
  }
  return out;
}

inline SingularMeasure transformed(const SingularMeasure& measure, double angle,
                                   const Point2& shift) {
  const Eigen::Rotation2Dd rot(angle);
  SingularMeasure out = measure;
  for (auto& a : out.atoms) a = rot * a + shift;
  return out;
}

// --- measures ---------------------------------------------------------------

struct CantorOptions {
  std::size_t atom_cap = std::size_t{1} << 16;
};

// Middle-thirds Cantor measure on the segment [start, start + length * direction]:
// one atom at the midpoint of each level-depth interval, equal masses.
inline SingularMeasure make_cantor_measure(int depth, const Point2& start = Point2(0, 0),
                                           double length = 1.0,
                                           const Point2& direction = Point2(1, 0),
                                           const CantorOptions& options = {}) {
  detail::require(depth >= 1, "make_cantor_measure: depth must be >= 1");
  detail::require(length > 0.0, "make_cantor_measure: segment length must be positive");
  detail::require(direction.norm() > 0.0, "make_cantor_measure: zero direction");
  if (depth >= 63 || (std::size_t{1} << depth) > options.atom_cap)
    throw resource_limit("make_cantor_measure: 2^" + std::to_string(depth) +
                         " atoms exceed the configured cap of " +
                         std::to_string(options.atom_cap));

  const std::size_t count = std::size_t{1} << depth;
  const Point2 e = direction.normalized();
  const double cell = std::pow(3.0, -depth);
  SingularMeasure m;
  m.cell_size = length * cell;
  m.cell_kind = CellKind::segment;
  m.alpha_nominal = std::numbers::ln2 / std::log(3.0);
  m.atoms.reserve(count);
  m.masses.assign(count, 1.0 / static_cast<double>(count));
  for (std::size_t idx = 0; idx < count; ++idx) {
    // binary digits of idx select left (0) or right (2) thirds, most significant first
    double left = 0.0;
    double scale = 1.0;
    for (int level = depth - 1; level >= 0; --level) {
      scale /= 3.0;
      if ((idx >> level) & 1u) left += 2.0 * scale;
    }
    m.atoms.push_back(start + length * (left + 0.5 * cell) * e);
  }
  return m;
}

// Uniform measure of the given total mass on the square [origin, origin + side]^2,
// one atom per cell center of a cells_per_side^2 grid.
inline SingularMeasure make_grid_measure(int cells_per_side, const Point2& origin = Point2(0, 0),
                                         double side = 1.0, double total_mass = 1.0) {
  detail::require(cells_per_side >= 1, "make_grid_measure: need at least one cell");
  detail::require(side > 0.0 && total_mass > 0.0, "make_grid_measure: side and mass must be positive");
  const double h = side / cells_per_side;
  const std::size_t count = static_cast<std::size_t>(cells_per_side) * cells_per_side;
  SingularMeasure m;
  m.cell_size = h;
  m.cell_kind = CellKind::square;
  m.alpha_nominal = 2.0;
  m.masses.assign(count, total_mass / static_cast<double>(count));
  for (int j = 0; j < cells_per_side; ++j)
    for (int i = 0; i < cells_per_side; ++i)
      m.atoms.push_back(origin + Point2((i + 0.5) * h, (j + 0.5) * h));
  return m;
}

inline SingularMeasure make_point_measure(const Point2& at, double mass = 1.0,
                                          double cell_size = 1.0) {
  detail::require(mass > 0.0 && cell_size > 0.0, "make_point_measure: mass and cell must be positive");
  SingularMeasure m;
  m.atoms = {at};
  m.masses = {mass};
  m.cell_size = cell_size;
  m.alpha_nominal = 0.0;
  return m;
}

// --- Ahlfors regularity -----------------------------------------------------

struct AhlforsParams {
  double alpha_hat = 0.0;
  double c0_hat = 0.0;
  double c1_hat = 0.0;
  std::vector<double> radii;
  // RMS residual of the per-center log-log fits; NaN when degenerate.
  double residual = 0.0;
  // Ball masses did not change over the ladder (slope carries no information).
  bool degenerate = false;
};

inline std::vector<double> geometric_radii(double r_max, double ratio, int count) {
  detail::require(r_max > 0.0 && ratio > 0.0 && ratio < 1.0 && count >= 1,
                  "geometric_radii: need r_max > 0, 0 < ratio < 1, count >= 1");
  std::vector<double> radii;
  double r = r_max;
  for (int i = 0; i < count; ++i, r *= ratio) radii.push_back(r);
  return radii;
}

inline double ball_mass(const AtomView& atoms, const Point2& center, double r) {
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if ((atoms.points[i] - center).norm() <= r) mass += atoms.masses[i];
  return mass;
}

// Estimates the exponent and frame constants of c0 r^alpha <= mu(B(X, r)) <= c1 r^alpha
// from exact ball masses of the atomized measure at sampled support points.
inline AhlforsParams estimate_ahlfors(const AtomView& atoms, std::span<const double> radii,
                                      int sample_count, std::uint64_t seed) {
  detail::require(!radii.empty(), "estimate_ahlfors: empty radii ladder");
  detail::require(sample_count >= 1, "estimate_ahlfors: sample_count must be >= 1");
  detail::require(atoms.size() >= 1, "estimate_ahlfors: empty measure");
  for (double r : radii) detail::require(r > 0.0, "estimate_ahlfors: radii must be positive");

  AhlforsParams out;
  out.radii.assign(radii.begin(), radii.end());

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  std::vector<std::size_t> centers;
  if (static_cast<std::size_t>(sample_count) >= atoms.size()) {
    centers.resize(atoms.size());
    std::iota(centers.begin(), centers.end(), std::size_t{0});
  } else {
    for (int s = 0; s < sample_count; ++s) centers.push_back(pick(rng));
  }

  const std::size_t m = radii.size();
  std::vector<double> log_r(m);
  for (std::size_t k = 0; k < m; ++k) log_r[k] = std::log(radii[k]);
  const double mean_lr = std::accumulate(log_r.begin(), log_r.end(), 0.0) / m;
  double sxx = 0.0;
  for (double v : log_r) sxx += (v - mean_lr) * (v - mean_lr);

  std::vector<std::vector<double>> masses(centers.size(), std::vector<double>(m));
  double slope_sum = 0.0;
  double residual_sq = 0.0;
  bool any_variation = false;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const Point2& x = atoms.points[centers[c]];
    std::vector<double> log_mu(m);
    for (std::size_t k = 0; k < m; ++k) {
      masses[c][k] = ball_mass(atoms, x, radii[k]);
      log_mu[k] = std::log(masses[c][k]);
    }
    if (m < 2 || sxx == 0.0) continue;
    const double mean_lm = std::accumulate(log_mu.begin(), log_mu.end(), 0.0) / m;
    double sxy = 0.0;
    for (std::size_t k = 0; k < m; ++k) sxy += (log_r[k] - mean_lr) * (log_mu[k] - mean_lm);
    const double slope = sxy / sxx;
    if (std::abs(slope) > 1e-12) any_variation = true;
    slope_sum += slope;
    for (std::size_t k = 0; k < m; ++k) {
      const double fit = mean_lm + slope * (log_r[k] - mean_lr);
      residual_sq += (log_mu[k] - fit) * (log_mu[k] - fit);
    }
  }

  out.alpha_hat = slope_sum / static_cast<double>(centers.size());
  out.degenerate = !any_variation || out.alpha_hat <= 0.0;
  out.residual = out.degenerate
                     ? std::numeric_limits<double>::quiet_NaN()
                     : std::sqrt(residual_sq / static_cast<double>(centers.size() * m));

  out.c0_hat = std::numeric_limits<double>::infinity();
  out.c1_hat = 0.0;
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (std::size_t k = 0; k < m; ++k) {
      const double scaled = masses[c][k] * std::pow(radii[k], -out.alpha_hat);
      out.c0_hat = std::min(out.c0_hat, scaled);
      out.c1_hat = std::max(out.c1_hat, scaled);
    }
  return out;
}

inline AhlforsParams estimate_ahlfors(const SingularMeasure& measure, std::span<const double> radii,
                                      int sample_count, std::uint64_t seed) {
  return estimate_ahlfors(atoms_of(measure), radii, sample_count, seed);
}

inline AhlforsParams estimate_ahlfors(const SurfaceMesh& mesh, std::span<const double> radii,
                                      int sample_count, std::uint64_t seed) {
  return estimate_ahlfors(atoms_of(mesh), radii, sample_count, seed);
}

// --- generic bases ----------------------------------------------------------

struct GenericBasisOptions {
  double tolerance = 1e-9;
  int max_attempts = 1000;
};

// Orthonormal basis e_1..e_N (columns) none of whose vectors lies in any of the
// given proper subspaces, each described by a spanning set of column vectors.
// Haar-random rotations with rejection; deterministic in the seed.
inline Eigen::MatrixXd generic_basis(int ambient_dim, const std::vector<Eigen::MatrixXd>& subspaces,
                                     std::uint64_t seed, const GenericBasisOptions& options = {}) {
  detail::require(ambient_dim >= 1, "generic_basis: dimension must be positive");
  const Eigen::Index n = ambient_dim;
  std::vector<Eigen::MatrixXd> ortho;
  for (const auto& span : subspaces) {
    detail::require(span.rows() == n, "generic_basis: spanning vectors have wrong dimension");
    if (span.cols() == 0) {
      ortho.emplace_back(n, 0);
      continue;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    detail::require(rank < n, "generic_basis: subspace is not proper");
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
    ortho.push_back(q);
  }
  if (ortho.empty()) return Eigen::MatrixXd::Identity(n, n);

  auto avoids_all = [&](const Eigen::VectorXd& e) {
    for (const auto& q : ortho) {
      const Eigen::VectorXd residual = e - q * (q.transpose() * e);
      if (!(residual.norm() > options.tolerance)) return false;
    }
    return true;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j)
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    bool ok = true;
    for (Eigen::Index j = 0; j < n && ok; ++j) ok = avoids_all(q.col(j));
    if (ok) return q;
  }
  throw internal_error("generic_basis: rejection sampling exceeded max attempts");
}

}  // namespace critspec
