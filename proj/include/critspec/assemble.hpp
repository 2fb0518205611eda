#pragma once
//
// Dense discretizations of L = W Gamma (A A*) Gamma* W on plane curves,
// atomized measures and area grids.
//
// Every discretization is first reduced to a symmetric kernel matrix B and
// per-node quadrature weights w with values V, so that the Nystrom matrix is
// B diag(V w). The symmetric operator matrix with the same nonzero spectrum is
//   V >= 0 :  D B D,  D = diag(sqrt(V w));
//   signed :  G^(1/2) S G^(1/2) with G = D B D, D = diag(sqrt(|V| w)), S = sign(V).
//
// Smooth closed curves use Kress' spectrally accurate product quadrature for
// the log(4 sin^2((t - s)/2)) part of the kernel and the trapezoid rule for the
// remainder. Polygons use midpoint collocation on flat panels with the log part
// integrated exactly over each panel.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "critspec/errors.hpp"
#include "critspec/geometry.hpp"
#include "critspec/hash.hpp"
#include "critspec/kernels.hpp"

namespace critspec {

// --- weights ----------------------------------------------------------------

struct ConstantWeight {
  double value = 1.0;
};

// V(X) = amplitude cos(frequency theta), theta the polar angle of X - center.
struct AngularWeight {
  Point2 center = Point2::Zero();
  double amplitude = 1.0;
  int frequency = 1;
};

struct TabulatedWeight {
  std::vector<double> values;
};

class WeightFn {
 public:
  using Kind = std::variant<ConstantWeight, AngularWeight, TabulatedWeight>;

  WeightFn() = default;
  WeightFn(Kind kind) : kind_(std::move(kind)) {}

  static WeightFn constant(double c) { return WeightFn(ConstantWeight{c}); }
  static WeightFn angular(const Point2& center = Point2::Zero(), double amplitude = 1.0,
                          int frequency = 1) {
    return WeightFn(AngularWeight{center, amplitude, frequency});
  }
  static WeightFn tabulated(std::vector<double> values) {
    return WeightFn(TabulatedWeight{std::move(values)});
  }

  const Kind& kind() const { return kind_; }

  std::vector<double> on(std::span<const Point2> nodes) const {
    std::vector<double> out(nodes.size());
    if (const auto* c = std::get_if<ConstantWeight>(&kind_)) {
      std::fill(out.begin(), out.end(), c->value);
    } else if (const auto* a = std::get_if<AngularWeight>(&kind_)) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Point2 d = nodes[i] - a->center;
        out[i] = a->amplitude * std::cos(a->frequency * std::atan2(d.y(), d.x()));
      }
    } else {
      const auto& t = std::get<TabulatedWeight>(kind_);
      detail::require(t.values.size() == nodes.size(),
                      "WeightFn: tabulated values do not match the node count");
      out = t.values;
    }
    return out;
  }

  std::string description() const {
    if (const auto* c = std::get_if<ConstantWeight>(&kind_))
      return "constant(" + std::to_string(c->value) + ")";
    if (const auto* a = std::get_if<AngularWeight>(&kind_))
      return "angular(" + std::to_string(a->amplitude) + "*cos(" + std::to_string(a->frequency) +
             " theta))";
    return "tabulated";
  }

 private:
  Kind kind_ = ConstantWeight{1.0};
};

inline std::vector<double> positive_part(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
  return out;
}

inline std::vector<double> negative_part(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(-v[i], 0.0);
  return out;
}

// --- discretized operators --------------------------------------------------

struct NodeMeta {
  std::string description;
  std::vector<std::size_t> block_sizes;
  std::uint64_t source_hash = 0;
};

// Symmetric kernel matrix with node quadrature weights and weight values.
struct DiscreteOperator {
  Eigen::MatrixXd kernel;
  std::vector<double> quad_weights;
  std::vector<double> values;
  NodeMeta meta;

  std::size_t size() const { return quad_weights.size(); }
};

struct OperatorMatrix {
  Eigen::MatrixXd entries;
  NodeMeta meta;
  bool signed_flag = false;

  Eigen::Index size() const { return entries.rows(); }
};

inline std::uint64_t hash_of(const SurfaceMesh& mesh) {
  Fnv1a h;
  for (const auto& p : mesh.nodes) {
    h.update(p.x());
    h.update(p.y());
  }
  h.update(std::span<const double>(mesh.weights));
  return h.digest();
}

inline std::uint64_t hash_of(const SingularMeasure& measure) {
  Fnv1a h;
  for (const auto& p : measure.atoms) {
    h.update(p.x());
    h.update(p.y());
  }
  h.update(std::span<const double>(measure.masses));
  h.update(measure.cell_size);
  return h.digest();
}

// Unsymmetric Nystrom matrix B diag(V w).
inline Eigen::MatrixXd nystrom_matrix(const DiscreteOperator& op) {
  Eigen::VectorXd scale(static_cast<Eigen::Index>(op.size()));
  for (std::size_t j = 0; j < op.size(); ++j) scale(j) = op.values[j] * op.quad_weights[j];
  return op.kernel * scale.asDiagonal();
}

inline OperatorMatrix symmetrize(const DiscreteOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  detail::require(op.kernel.rows() == n && op.kernel.cols() == n,
                  "symmetrize: kernel/weight size mismatch");
  OperatorMatrix out;
  out.meta = op.meta;
  Eigen::VectorXd d(n);
  Eigen::VectorXd sign(n);
  bool has_neg = false;
  bool has_pos = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double v = op.values[j];
    d(j) = std::sqrt(std::abs(v) * op.quad_weights[j]);
    sign(j) = v < 0.0 ? -1.0 : 1.0;
    has_neg = has_neg || v < 0.0;
    has_pos = has_pos || v > 0.0;
  }
  Eigen::MatrixXd g = d.asDiagonal() * op.kernel * d.asDiagonal();
  g = 0.5 * (g + g.transpose());
  if (!has_neg) {
    out.entries = std::move(g);
    return out;
  }
  out.signed_flag = has_pos;
  if (!has_pos) {
    out.entries = -g;
    return out;
  }
  // G^(1/2) S G^(1/2) through the spectral square root of G (negative rounding
  // eigenvalues of G are clipped).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  if (eig.info() != Eigen::Success) throw internal_error("symmetrize: eigensolver failed");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd half = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  Eigen::MatrixXd m = half * sign.asDiagonal() * half;
  out.entries = 0.5 * (m + m.transpose());
  return out;
}

// --- kernel blocks ----------------------------------------------------------

namespace detail {

// int_{-L/2}^{L/2} log|x - (c + s tau)| ds for a flat panel of length L.
inline double panel_log_integral(const Point2& x, const Point2& c, const Point2& tau, double length) {
  const Point2 d = x - c;
  const double a = d.dot(tau);
  const double b = std::abs(d.x() * tau.y() - d.y() * tau.x());
  auto antiderivative = [b](double u) {
    if (b == 0.0) return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u;
    return 0.5 * u * std::log(u * u + b * b) - u + b * std::atan(u / b);
  };
  return antiderivative(0.5 * length - a) - antiderivative(-0.5 * length - a);
}

// Kress weights R_|i-j| / h for n equispaced nodes, n = 2P.
inline std::vector<double> kress_log_weights(std::size_t n) {
  const std::size_t p = n / 2;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  std::vector<double> r(n);
  for (std::size_t d = 0; d < n; ++d) {
    double sum = 0.0;
    for (std::size_t m = 1; m < p; ++m) sum += std::cos(static_cast<double>(m * d) * h) / m;
    const double last = (d % 2 == 0) ? 1.0 : -1.0;
    const double weight = -(2.0 * std::numbers::pi / p) * sum -
                          (std::numbers::pi / (static_cast<double>(p) * p)) * last;
    r[d] = weight / h;
  }
  return r;
}

inline Eigen::MatrixXd point_block(std::span<const Point2> a, std::span<const Point2> b,
                                   const KernelModel& kernel) {
  Eigen::MatrixXd block(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) block(i, j) = eval_kernel(kernel, a[i], b[j]);
  return block;
}

inline Eigen::MatrixXd smooth_curve_block(const SurfaceMesh& mesh, const KernelModel& kernel) {
  const std::size_t n = mesh.size();
  Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (kernel.order == KernelOrder::lower_order) {
    for (std::size_t i = 0; i < n; ++i) {
      b(i, i) = kernel_diagonal(kernel);
      for (std::size_t j = i + 1; j < n; ++j)
        b(i, j) = b(j, i) = kernel_radial(kernel, (mesh.nodes[i] - mesh.nodes[j]).norm());
    }
    return b;
  }
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const auto r = kress_log_weights(n);
  const double inv_four_pi = 0.25 / std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double speed = mesh.weights[i] / h;
    b(i, i) = r[0] * (-inv_four_pi) + inv_two_pi * (std::numbers::ln2 - euler_gamma - std::log(speed));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = (mesh.nodes[i] - mesh.nodes[j]).norm();
      const double k1 = -inv_four_pi * bessel_i(0, dist);
      const double half_gap = 0.5 * (mesh.param_values[i] - mesh.param_values[j]);
      const double s = std::sin(half_gap);
      const double log_part = std::log(4.0 * s * s);
      const double k2 = inv_two_pi * bessel_k(0, dist) - k1 * log_part;
      b(i, j) = b(j, i) = r[j - i] * k1 + k2;
    }
  }
  return b;
}

inline Eigen::MatrixXd polygon_block(const SurfaceMesh& mesh, const KernelModel& kernel) {
  const std::size_t n = mesh.size();
  Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (kernel.order == KernelOrder::lower_order) {
    for (std::size_t i = 0; i < n; ++i) {
      b(i, i) = kernel_diagonal(kernel);
      for (std::size_t j = i + 1; j < n; ++j)
        b(i, j) = b(j, i) = kernel_radial(kernel, (mesh.nodes[i] - mesh.nodes[j]).norm());
    }
    return b;
  }
  const double a = kernel.log_coefficient();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = mesh.weights[j];
      const double log_int = panel_log_integral(mesh.nodes[i], mesh.nodes[j], mesh.tangents[j], w);
      const double dist = (mesh.nodes[i] - mesh.nodes[j]).norm();
      const double regular = kernel_regular_part(kernel, i == j ? 0.0 : dist);
      b(i, j) = a * log_int / w + regular;
    }
  }
  return 0.5 * (b + b.transpose());
}

inline Eigen::MatrixXd cell_block(std::span<const Point2> centers, const Cell& cell,
                                  const KernelModel& kernel) {
  const std::size_t n = centers.size();
  Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double diag = kernel.order == KernelOrder::reference ? self_cell_coefficient(cell)
                                                             : kernel_diagonal(kernel);
  for (std::size_t i = 0; i < n; ++i) {
    b(i, i) = diag;
    for (std::size_t j = i + 1; j < n; ++j) b(i, j) = b(j, i) = eval_kernel(kernel, centers[i], centers[j]);
  }
  return b;
}

}  // namespace detail

inline Eigen::MatrixXd curve_kernel_block(const SurfaceMesh& mesh, const KernelModel& kernel) {
  detail::require(mesh.ambient_dim == kernel.ambient_dim, "kernel/mesh dimension mismatch");
  detail::require(mesh.size() >= 2, "curve mesh needs at least two nodes");
  if (mesh.kind == MeshKind::smooth_closed) {
    detail::require(mesh.size() % 2 == 0, "smooth curve quadrature needs an even node count");
    return detail::smooth_curve_block(mesh, kernel);
  }
  return detail::polygon_block(mesh, kernel);
}

inline DiscreteOperator discretize_curve(const SurfaceMesh& mesh, const WeightFn& v,
                                         const KernelModel& kernel) {
  DiscreteOperator op;
  op.kernel = curve_kernel_block(mesh, kernel);
  op.quad_weights = mesh.weights;
  op.values = v.on(mesh.nodes);
  op.meta.description = std::string(mesh.kind == MeshKind::smooth_closed ? "smooth-curve" : "polygon") +
                        " n=" + std::to_string(mesh.size()) + " V=" + v.description() + " kernel=" +
                        kernel.description();
  op.meta.block_sizes = {mesh.size()};
  op.meta.source_hash = hash_of(mesh);
  return op;
}

inline OperatorMatrix assemble_curve_operator(const SurfaceMesh& mesh, const WeightFn& v,
                                              const KernelModel& kernel) {
  return symmetrize(discretize_curve(mesh, v, kernel));
}

inline DiscreteOperator discretize_measure(const SingularMeasure& measure, const WeightFn& v,
                                           const KernelModel& kernel) {
  detail::require(measure.ambient_dim == kernel.ambient_dim, "kernel/measure dimension mismatch");
  detail::require(measure.cell_size > 0.0, "measure cell_size must be positive");
  DiscreteOperator op;
  op.kernel = detail::cell_block(measure.atoms, Cell{measure.cell_kind, measure.cell_size}, kernel);
  op.quad_weights = measure.masses;
  op.values = v.on(measure.atoms);
  op.meta.description = "measure atoms=" + std::to_string(measure.size()) + " V=" + v.description();
  op.meta.block_sizes = {measure.size()};
  op.meta.source_hash = hash_of(measure);
  return op;
}

inline OperatorMatrix assemble_measure_operator(const SingularMeasure& measure, const WeightFn& v,
                                                const KernelModel& kernel) {
  return symmetrize(discretize_measure(measure, v, kernel));
}

// --- mixed area + curve configurations ---------------------------------------

// Uniform square cells of side h (only cells with nonzero density are kept).
struct AreaGrid {
  std::vector<Point2> centers;
  std::vector<double> density;
  double h = 1.0;
  Point2 box_lo = Point2::Zero();
  Point2 box_hi = Point2::Zero();

  std::size_t size() const { return centers.size(); }
  double cell_area() const { return h * h; }
};

// Cells of the box [lo, hi] with side h carrying density(center) != 0, minus the
// cells within one cell diagonal of any node of the excluded curves.
inline AreaGrid make_area_grid(const Point2& lo, const Point2& hi, double h,
                               const std::function<double(const Point2&)>& density,
                               std::span<const SurfaceMesh> exclusions = {}) {
  detail::require(h > 0.0 && (hi - lo).minCoeff() > 0.0, "make_area_grid: invalid box or cell size");
  AreaGrid grid;
  grid.h = h;
  grid.box_lo = lo;
  grid.box_hi = hi;
  const int nx = static_cast<int>(std::floor((hi.x() - lo.x()) / h + 1e-9));
  const int ny = static_cast<int>(std::floor((hi.y() - lo.y()) / h + 1e-9));
  const double diag = h * std::numbers::sqrt2;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Point2 c = lo + Point2((i + 0.5) * h, (j + 0.5) * h);
      const double value = density(c);
      if (value == 0.0) continue;
      bool clear = true;
      for (const auto& mesh : exclusions) {
        for (const auto& node : mesh.nodes)
          if ((node - c).norm() < diag) {
            clear = false;
            break;
          }
        if (!clear) break;
      }
      if (!clear) continue;
      grid.centers.push_back(c);
      grid.density.push_back(value);
    }
  return grid;
}

struct CurveTerm {
  SurfaceMesh mesh;
  WeightFn weight;
};

inline DiscreteOperator discretize_mixed(const AreaGrid& grid, std::span<const CurveTerm> curves,
                                         const KernelModel& kernel) {
  const double diag = grid.h * std::numbers::sqrt2;
  for (const auto& curve : curves) {
    detail::require(curve.mesh.ambient_dim == kernel.ambient_dim, "kernel/mesh dimension mismatch");
    if (grid.size() == 0) continue;
    for (const auto& node : curve.mesh.nodes) {
      detail::require((node - grid.box_lo).minCoeff() > 0.0 && (grid.box_hi - node).minCoeff() > 0.0,
                      "assemble_mixed: curve leaves the grid domain");
      for (const auto& c : grid.centers)
        if ((node - c).norm() < diag)
          throw invalid_argument("assemble_mixed: curve node within one cell diagonal of an area cell");
    }
  }

  std::vector<std::vector<Point2>> blocks;
  std::vector<Eigen::MatrixXd> diagonal_blocks;
  DiscreteOperator op;
  op.meta.description = "mixed cells=" + std::to_string(grid.size()) +
                        " curves=" + std::to_string(curves.size());
  Fnv1a hash;
  if (grid.size() > 0) {
    blocks.push_back(grid.centers);
    diagonal_blocks.push_back(detail::cell_block(grid.centers, Cell{CellKind::square, grid.h}, kernel));
    op.quad_weights.insert(op.quad_weights.end(), grid.size(), grid.cell_area());
    op.values.insert(op.values.end(), grid.density.begin(), grid.density.end());
    op.meta.block_sizes.push_back(grid.size());
    for (const auto& c : grid.centers) {
      hash.update(c.x());
      hash.update(c.y());
    }
    hash.update(std::span<const double>(grid.density));
  }
  for (const auto& curve : curves) {
    blocks.push_back(curve.mesh.nodes);
    diagonal_blocks.push_back(curve_kernel_block(curve.mesh, kernel));
    op.quad_weights.insert(op.quad_weights.end(), curve.mesh.weights.begin(), curve.mesh.weights.end());
    const auto values = curve.weight.on(curve.mesh.nodes);
    op.values.insert(op.values.end(), values.begin(), values.end());
    op.meta.block_sizes.push_back(curve.mesh.size());
    const auto mesh_hash = hash_of(curve.mesh);
    hash.update(&mesh_hash, sizeof mesh_hash);
  }
  op.meta.source_hash = hash.digest();

  const auto n = static_cast<Eigen::Index>(op.quad_weights.size());
  op.kernel.resize(n, n);
  Eigen::Index row = 0;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    const auto na = static_cast<Eigen::Index>(blocks[a].size());
    op.kernel.block(row, row, na, na) = diagonal_blocks[a];
    Eigen::Index col = row + na;
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      const auto nb = static_cast<Eigen::Index>(blocks[b].size());
      const Eigen::MatrixXd cross = detail::point_block(blocks[a], blocks[b], kernel);
      op.kernel.block(row, col, na, nb) = cross;
      op.kernel.block(col, row, nb, na) = cross.transpose();
      col += nb;
    }
    row += na;
  }
  return op;
}

inline OperatorMatrix assemble_mixed(const AreaGrid& grid, std::span<const CurveTerm> curves,
                                     const KernelModel& kernel) {
  return symmetrize(discretize_mixed(grid, curves, kernel));
}

}  // namespace critspec
