#pragma once
//
// Text and binary persistence: meshes, measures, operator matrices, spectra,
// counting tables, fits and coefficient reports.
//

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "critspec/assemble.hpp"
#include "critspec/asymptotics.hpp"
#include "critspec/covering.hpp"
#include "critspec/errors.hpp"
#include "critspec/geometry.hpp"
#include "critspec/hash.hpp"
#include "critspec/spectra.hpp"

namespace critspec {

using json = nlohmann::json;

inline void write_mesh(std::ostream& os, const SurfaceMesh& mesh) {
  os.precision(17);
  os << "# mesh nodes=" << mesh.size() << " kind="
     << (mesh.kind == MeshKind::smooth_closed ? "smooth" : "polygon")
     << " hash=" << hex_digest(hash_of(mesh)) << "\n";
  os << "# x y weight tx ty\n";
  for (std::size_t i = 0; i < mesh.size(); ++i)
    os << mesh.nodes[i].x() << ' ' << mesh.nodes[i].y() << ' ' << mesh.weights[i] << ' '
       << mesh.tangents[i].x() << ' ' << mesh.tangents[i].y() << '\n';
}

inline void write_measure(std::ostream& os, const SingularMeasure& measure) {
  os.precision(17);
  os << "# measure atoms=" << measure.atoms.size() << " cell_size=" << measure.cell_size
     << " alpha_nominal=" << measure.alpha_nominal << " hash=" << hex_digest(hash_of(measure))
     << "\n";
  os << "# x y mass\n";
  for (std::size_t i = 0; i < measure.atoms.size(); ++i)
    os << measure.atoms[i].x() << ' ' << measure.atoms[i].y() << ' ' << measure.masses[i] << '\n';
}

// --- matrices ---------------------------------------------------------------

struct MatrixHeader {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::uint64_t source_hash = 0;
  std::uint64_t config_hash = 0;
  bool signed_flag = false;
};

namespace detail {
inline constexpr char matrix_magic[8] = {'C', 'S', 'P', 'M', 'A', 'T', '0', '1'};
}

// Layout: magic[8], rows, cols (int64), source hash, config hash (uint64),
// signed flag (uint64), then rows*cols doubles in row-major order. Native
// byte order.
inline void write_matrix_binary(const std::filesystem::path& path, const OperatorMatrix& m,
                                std::uint64_t config_hash = 0) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_argument("write_matrix_binary: cannot open " + path.string());
  const std::int64_t rows = m.entries.rows();
  const std::int64_t cols = m.entries.cols();
  const std::uint64_t signed_word = m.signed_flag ? 1 : 0;
  out.write(detail::matrix_magic, sizeof detail::matrix_magic);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(&m.meta.source_hash), sizeof m.meta.source_hash);
  out.write(reinterpret_cast<const char*>(&config_hash), sizeof config_hash);
  out.write(reinterpret_cast<const char*>(&signed_word), sizeof signed_word);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = m.entries(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  if (!out) throw invalid_argument("write_matrix_binary: write failed for " + path.string());
}

inline Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path,
                                          MatrixHeader* header = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_argument("read_matrix_binary: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, detail::matrix_magic, sizeof magic) != 0)
    throw invalid_argument("read_matrix_binary: not a matrix file: " + path.string());
  MatrixHeader h;
  std::uint64_t signed_word = 0;
  in.read(reinterpret_cast<char*>(&h.rows), sizeof h.rows);
  in.read(reinterpret_cast<char*>(&h.cols), sizeof h.cols);
  in.read(reinterpret_cast<char*>(&h.source_hash), sizeof h.source_hash);
  in.read(reinterpret_cast<char*>(&h.config_hash), sizeof h.config_hash);
  in.read(reinterpret_cast<char*>(&signed_word), sizeof signed_word);
  if (!in || h.rows < 0 || h.cols < 0) throw invalid_argument("read_matrix_binary: bad header");
  h.signed_flag = signed_word != 0;
  Eigen::MatrixXd m(h.rows, h.cols);
  for (Eigen::Index i = 0; i < h.rows; ++i)
    for (Eigen::Index j = 0; j < h.cols; ++j) in.read(reinterpret_cast<char*>(&m(i, j)), sizeof(double));
  if (!in) throw invalid_argument("read_matrix_binary: truncated data in " + path.string());
  if (header) *header = h;
  return m;
}

inline void write_matrix_text(std::ostream& os, const OperatorMatrix& m, std::uint64_t config_hash = 0) {
  os.precision(17);
  os << "# rows=" << m.entries.rows() << " cols=" << m.entries.cols()
     << " source_hash=" << hex_digest(m.meta.source_hash) << " config_hash=" << hex_digest(config_hash)
     << " signed=" << (m.signed_flag ? 1 : 0) << "\n";
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) os << (j ? " " : "") << m.entries(i, j);
    os << '\n';
  }
}

// --- plot data --------------------------------------------------------------

// Columns k, lambda_k, k_lambda_k. Negative eigenvalues keep their sign.
inline void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum, Sign sign = Sign::plus) {
  os.precision(17);
  os << "k,lambda_k,k_lambda_k\n";
  const auto& side = spectrum.side(sign);
  for (std::size_t k = 1; k <= side.size(); ++k)
    os << k << ',' << side[k - 1] << ',' << static_cast<double>(k) * side[k - 1] << '\n';
}

struct CountingRow {
  double lambda = 0.0;
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
};

inline std::vector<CountingRow> counting_table(const Spectrum& spectrum, std::span<const double> grid) {
  std::vector<CountingRow> rows;
  rows.reserve(grid.size());
  for (double lambda : grid)
    rows.push_back({lambda, counting(spectrum, lambda, Sign::plus), counting(spectrum, lambda, Sign::minus)});
  return rows;
}

// Columns lambda, n_plus, n_minus, lambda_times_n with n = n_plus + n_minus.
inline void write_counting_csv(std::ostream& os, std::span<const CountingRow> rows) {
  os.precision(17);
  os << "lambda,n_plus,n_minus,lambda_times_n\n";
  for (const auto& r : rows)
    os << r.lambda << ',' << r.n_plus << ',' << r.n_minus << ','
       << r.lambda * static_cast<double>(r.n_plus + r.n_minus) << '\n';
}

// --- JSON summaries ---------------------------------------------------------

inline json to_json(const SideFit& fit) {
  return {{"available", fit.available},
          {"coefficient", fit.coefficient},
          {"dispersion", fit.dispersion},
          {"samples", fit.samples}};
}

inline json to_json(const WeylFit& fit) {
  return {{"c_plus", fit.c_plus()},
          {"c_minus", fit.c_minus()},
          {"window", {fit.window.k_min, fit.window.k_max}},
          {"plus", to_json(fit.plus)},
          {"minus", to_json(fit.minus)}};
}

inline json to_json(const AsymCoeff& c) {
  json parts = json::array();
  for (const auto& p : c.breakdown)
    parts.push_back({{"label", p.label}, {"c_plus", p.c_plus}, {"c_minus", p.c_minus}});
  return {{"c_plus", c.c_plus}, {"c_minus", c.c_minus}, {"breakdown", parts}};
}

inline json to_json(const CoveringReport& r) {
  return {{"lambda", r.lambda},
          {"cube_count", r.cube_count},
          {"family_count", r.family_count},
          {"multiplicity_observed", r.multiplicity_observed},
          {"multiplicity_exceeded", r.multiplicity_exceeded},
          {"max_j", r.max_j},
          {"rho_infinity", r.rho_infinity},
          {"bound_value", r.bound_value},
          {"threshold_violated", r.threshold_violated}};
}

// Writes through a sibling temporary file and renames it into place, so readers
// never observe a partial file.
inline void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_argument("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw invalid_argument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace critspec
