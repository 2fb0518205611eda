#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "critspec/assemble.hpp"
#include "critspec/bessel.hpp"
#include "critspec/spectra.hpp"

using namespace critspec;

namespace {

Spectrum spectrum_of(const OperatorMatrix& m) { return eigensolve(m.entries); }

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

TEST(Assemble, TwoAtomEntry) {
  SingularMeasure m;
  m.atoms = {Point2(0, 0), Point2(1, 0)};
  m.masses = {0.5, 0.25};
  m.cell_size = 0.1;
  const auto op = assemble_measure_operator(m, WeightFn::constant(2.0), KernelModel::reference());
  EXPECT_NEAR(op.entries(0, 1), std::sqrt(2.0 * 0.5 * 2.0 * 0.25) * 0.067008120508497137, 1e-15);
  EXPECT_EQ(op.entries(0, 1), op.entries(1, 0));
  EXPECT_FALSE(op.signed_flag);
}

TEST(Assemble, CircleMatchesBesselProducts) {
  const auto mesh = make_smooth_curve(Circle{}, 64);
  const auto s = spectrum_of(assemble_curve_operator(mesh, WeightFn::constant(1.0), KernelModel::reference()));
  EXPECT_NEAR(s.positives[0], bessel_i(0, 1.0) * bessel_k(0, 1.0), 1e-12);
  EXPECT_NEAR(s.positives[1], bessel_i(1, 1.0) * bessel_k(1, 1.0), 1e-12);
  EXPECT_NEAR(s.positives[2], bessel_i(1, 1.0) * bessel_k(1, 1.0), 1e-12);
  EXPECT_NEAR(s.positives[3], bessel_i(2, 1.0) * bessel_k(2, 1.0), 1e-12);
}

TEST(Assemble, CircleRadiusTwo) {
  const auto mesh = make_smooth_curve(Circle{Point2(1, -1), 2.0}, 128);
  const auto s = spectrum_of(assemble_curve_operator(mesh, WeightFn::constant(1.0), KernelModel::reference()));
  for (int m = 0; m < 4; ++m) {
    const double exact = 2.0 * bessel_i(m, 2.0) * bessel_k(m, 2.0);
    EXPECT_NEAR(s.positives[m == 0 ? 0 : 2 * m - 1] / exact, 1.0, 1e-10) << m;
  }
}

TEST(Assemble, ZeroWeightGivesZeroOperator) {
  const auto mesh = make_smooth_curve(Circle{}, 32);
  const auto op = assemble_curve_operator(mesh, WeightFn::constant(0.0), KernelModel::reference());
  EXPECT_EQ(op.entries.cwiseAbs().maxCoeff(), 0.0);
  const auto s = spectrum_of(op);
  EXPECT_TRUE(s.positives.empty());
  EXPECT_TRUE(s.negatives.empty());
}

TEST(Assemble, NystromSimilarity) {
  // for V > 0 the symmetrized matrix is similar to B diag(V w)
  const auto mesh = make_smooth_curve(Star{Point2::Zero(), 1.0, 0.25, 3}, 64);
  const WeightFn w = WeightFn::tabulated([&] {
    std::vector<double> v;
    for (const auto& p : mesh.nodes) v.push_back(1.5 + p.x());
    return v;
  }());
  const auto op = discretize_curve(mesh, w, KernelModel::reference());
  const auto sym = spectrum_of(symmetrize(op));
  Eigen::EigenSolver<Eigen::MatrixXd> general(nystrom_matrix(op), false);
  std::vector<double> raw;
  for (Eigen::Index i = 0; i < general.eigenvalues().size(); ++i) {
    EXPECT_LT(std::abs(general.eigenvalues()(i).imag()), 1e-10);
    raw.push_back(general.eigenvalues()(i).real());
  }
  raw = sorted_desc(raw);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_NEAR(sym.positives[k], raw[k], 1e-10 * raw[0]);
}

TEST(Assemble, SignedSymmetrizationMatchesNystrom) {
  const auto mesh = make_smooth_curve(Circle{}, 64);
  const auto op = discretize_curve(mesh, WeightFn::angular(), KernelModel::reference());
  const auto m = symmetrize(op);
  EXPECT_TRUE(m.signed_flag);
  const auto s = spectrum_of(m);
  Eigen::EigenSolver<Eigen::MatrixXd> general(nystrom_matrix(op), false);
  std::vector<double> pos;
  for (Eigen::Index i = 0; i < general.eigenvalues().size(); ++i)
    if (general.eigenvalues()(i).real() > 1e-8) pos.push_back(general.eigenvalues()(i).real());
  pos = sorted_desc(pos);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(s.positives[k], pos[k], 1e-10);
}

TEST(Assemble, RefinementConverges) {
  const auto shape = Ellipse{Point2::Zero(), 1.5, 0.75};
  const auto coarse = spectrum_of(assemble_curve_operator(make_smooth_curve(shape, 128), WeightFn::constant(1.0),
                                                          KernelModel::reference()));
  const auto fine = spectrum_of(assemble_curve_operator(make_smooth_curve(shape, 256), WeightFn::constant(1.0),
                                                        KernelModel::reference()));
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(coarse.positives[k] / fine.positives[k], 1.0, 1e-10) << k;
}

TEST(Assemble, SignSeparationForCosine) {
  const auto mesh = make_smooth_curve(Circle{}, 256);
  const auto s = spectrum_of(assemble_curve_operator(mesh, WeightFn::angular(), KernelModel::reference()));
  for (double lambda : geometric_grid(0.01, 0.3, 20)) {
    const long diff = static_cast<long>(counting(s, lambda, Sign::plus)) - static_cast<long>(counting(s, lambda, Sign::minus));
    EXPECT_LE(std::abs(diff), 1) << lambda;
  }
}

TEST(Assemble, RigidMotionInvariance) {
  const auto mesh = make_polygon_curve(unit_square_vertices(), 16, 3.0);
  const auto moved = transformed(mesh, 1.1, Point2(-4.0, 2.5));
  const auto a = spectrum_of(assemble_curve_operator(mesh, WeightFn::constant(1.0), KernelModel::reference()));
  const auto b = spectrum_of(assemble_curve_operator(moved, WeightFn::constant(1.0), KernelModel::reference()));
  ASSERT_EQ(a.positives.size(), b.positives.size());
  for (std::size_t k = 0; k < a.positives.size(); ++k) EXPECT_NEAR(a.positives[k], b.positives[k], 1e-12);
}

TEST(Assemble, PolygonMatrixSymmetric) {
  const auto mesh = make_polygon_curve(unit_square_vertices(), 8, 3.0);
  const auto op = assemble_curve_operator(mesh, WeightFn::constant(1.0), KernelModel::reference());
  EXPECT_EQ((op.entries - op.entries.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assemble, CantorRefinementStable) {
  const auto a = spectrum_of(assemble_measure_operator(make_cantor_measure(8), WeightFn::constant(1.0),
                                                       KernelModel::reference()));
  const auto b = spectrum_of(assemble_measure_operator(make_cantor_measure(9), WeightFn::constant(1.0),
                                                       KernelModel::reference()));
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(a.positives[k] / b.positives[k], 1.0, 0.02) << k;
}

TEST(Assemble, MixedWithoutDensityDecouples) {
  const auto circle = make_smooth_curve(Circle{Point2(2, 0), 0.5}, 64);
  const auto grid = make_area_grid(Point2(-1, -1), Point2(3, 1), 0.1, [](const Point2&) { return 0.0; });
  EXPECT_EQ(grid.size(), 0u);
  const std::vector<CurveTerm> terms{{circle, WeightFn::constant(1.0)}};
  const auto mixed = spectrum_of(assemble_mixed(grid, terms, KernelModel::reference()));
  const auto alone = spectrum_of(assemble_curve_operator(circle, WeightFn::constant(1.0), KernelModel::reference()));
  ASSERT_EQ(mixed.positives.size(), alone.positives.size());
  for (std::size_t k = 0; k < alone.positives.size(); ++k) EXPECT_NEAR(mixed.positives[k], alone.positives[k], 1e-14);
}

TEST(Assemble, MixedBlockLayout) {
  const auto circle = make_smooth_curve(Circle{Point2(2, 0), 0.5}, 32);
  const auto grid = make_area_grid(Point2(-1, -1), Point2(3, 1), 0.25,
                                   [](const Point2& p) { return p.norm() < 1.0 ? 1.0 : 0.0; });
  const std::vector<CurveTerm> terms{{circle, WeightFn::constant(1.0)}};
  const auto op = discretize_mixed(grid, terms, KernelModel::reference());
  ASSERT_EQ(op.meta.block_sizes.size(), 2u);
  EXPECT_EQ(op.meta.block_sizes[0], grid.size());
  EXPECT_EQ(op.meta.block_sizes[1], 32u);
  EXPECT_EQ((op.kernel - op.kernel.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assemble, MixedRejectsCurveInsideCells) {
  const auto circle = make_smooth_curve(Circle{Point2::Zero(), 0.5}, 32);
  const auto grid = make_area_grid(Point2(-1, -1), Point2(1, 1), 0.1,
                                   [](const Point2& p) { return p.norm() < 1.0 ? 1.0 : 0.0; });
  const std::vector<CurveTerm> terms{{circle, WeightFn::constant(1.0)}};
  EXPECT_THROW(assemble_mixed(grid, terms, KernelModel::reference()), invalid_argument);
  // the same layout with the ring of cells around the curve removed is accepted
  const std::vector<SurfaceMesh> exclude{circle};
  const auto cleared = make_area_grid(Point2(-1, -1), Point2(1, 1), 0.1,
                                      [](const Point2& p) { return p.norm() < 1.0 ? 1.0 : 0.0; }, exclude);
  EXPECT_LT(cleared.size(), grid.size());
  EXPECT_NO_THROW(assemble_mixed(cleared, terms, KernelModel::reference()));
}

TEST(Assemble, TabulatedWeightSizeChecked) {
  const auto mesh = make_smooth_curve(Circle{}, 16);
  EXPECT_THROW(discretize_curve(mesh, WeightFn::tabulated({1.0, 2.0}), KernelModel::reference()), invalid_argument);
}

TEST(Assemble, SourceHashTracksGeometry) {
  const auto a = make_smooth_curve(Circle{}, 32);
  const auto b = make_smooth_curve(Circle{Point2::Zero(), 1.001}, 32);
  EXPECT_EQ(hash_of(a), hash_of(make_smooth_curve(Circle{}, 32)));
  EXPECT_NE(hash_of(a), hash_of(b));
}
