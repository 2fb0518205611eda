// critspec: command-line front end for the experiment suite.
//
// Exit codes: 0 all criteria pass, 1 a criterion failed, 2 usage or config
// error, 3 resource limit exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "critspec/critspec.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;
constexpr int exit_resource = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--out", flags.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", flags.seed, "random seed (overrides seed)");
  cmd->add_option("--n", flags.n, "resolution (overrides n)");
}

critspec::ExperimentConfig load(const CommonFlags& flags) {
  std::ifstream in(flags.config);
  if (!in) throw critspec::invalid_argument("cannot read config file '" + flags.config + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = critspec::parse_config_text(buffer.str());
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.n) {
    critspec::detail::require(*flags.n > 0, "--n must be positive");
    config.n = *flags.n;
  }
  return config;
}

void print_criteria(const critspec::ExperimentReport& report) {
  for (const auto& c : report.criteria)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << c.measured
              << " expected=" << c.expected << " tol=" << c.tolerance
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
}

int cmd_run(const CommonFlags& flags) {
  const auto config = load(flags);
  const auto report = critspec::run_experiment(config);
  critspec::write_report(config, report);
  print_criteria(report);
  std::cout << "report: " << (config.output_dir / "report.json").string() << "\n";
  return report.passed() ? exit_pass : exit_fail;
}

// Expected coefficients for the configured geometry, or the rho(N, d) table.
int cmd_coeff(const CommonFlags& flags, int max_dim) {
  using namespace critspec;
  json out;
  if (flags.config.empty()) {
    out["rho"] = json::array();
    for (int n = 2; n <= max_dim; ++n)
      for (int d = 1; d < n; ++d) {
        const auto r = r_symbol(n, d);
        out["rho"].push_back({{"N", n}, {"d", d}, {"closed_form", r.closed_form}, {"quadrature", r.quadrature},
                              {"agree", r.agree}});
      }
    out["ac_unit_disk"] = coefficient_ac_disk(1.0, 1.0).c_plus;
  } else {
    auto config = load(flags);
    config.tolerances = json::object();
    detail::Run run(config);
    const auto& g = config.geometry;
    std::vector<CoefficientPart> parts;
    if (config.experiment == "circle-weyl" || config.experiment == "signed-weight" ||
        config.experiment == "lower-order-decay") {
      const auto fallback = config.experiment == "signed-weight" ? WeightFn::angular() : WeightFn::constant(1.0);
      parts.push_back(coefficient_surface(detail::circle_mesh(run, 512), run.weight(fallback)));
    } else if (config.experiment == "two-surfaces") {
      const auto w = run.weight(WeightFn::constant(1.0));
      parts.push_back(coefficient_surface(make_smooth_curve(Circle{Point2::Zero(), detail::field(g, "radius", 1.0)}, 256), w));
      parts.push_back(coefficient_surface(make_smooth_curve(Circle{Point2::Zero(), detail::field(g, "radius_2", 2.0)}, 512), w));
    } else if (config.experiment == "mixed-ac-singular") {
      parts.push_back(coefficient_ac_disk(detail::field(g, "disk_radius", 1.0), detail::field(g, "disk_density", 1.0)));
      parts.push_back(coefficient_surface(
          make_smooth_curve(Circle{Point2::Zero(), detail::field(g, "circle_radius", 0.5)}, 256),
          run.weight(WeightFn::constant(1.0))));
    } else if (config.experiment == "polygon-weyl") {
      parts.push_back(coefficient_surface(make_polygon_curve(detail::polygon_vertices(g), 64, detail::field(g, "grading", 3.0)),
                                          run.weight(WeightFn::constant(1.0))));
    } else {
      throw invalid_argument("coeff: experiment '" + config.experiment + "' has no Weyl coefficient");
    }
    out = to_json(coefficient_total(parts));
  }
  std::cout << out.dump(2) << "\n";
  return exit_pass;
}

// Spectrum and Weyl fit for a curve experiment's operator, without criteria.
int cmd_spectrum(const CommonFlags& flags) {
  using namespace critspec;
  auto config = load(flags);
  if (config.experiment != "circle-weyl" && config.experiment != "signed-weight" &&
      config.experiment != "lower-order-decay")
    throw invalid_argument("spectrum: supported for circle-weyl, signed-weight and lower-order-decay configs");
  detail::Run run(config);
  const auto mesh = detail::circle_mesh(run, 512);
  const auto weight = run.weight(config.experiment == "signed-weight" ? WeightFn::angular() : WeightFn::constant(1.0));
  const auto kernel =
      config.experiment == "lower-order-decay" ? KernelModel::lower_order_companion() : KernelModel::reference();
  const auto matrix = assemble_curve_operator(mesh, weight, kernel);
  const auto s = run.solve(matrix);
  std::filesystem::create_directories(config.output_dir);
  std::ostringstream plus;
  write_spectrum_csv(plus, s, Sign::plus);
  write_atomically(config.output_dir / "spectrum_plus.csv", plus.str());
  std::ostringstream minus;
  write_spectrum_csv(minus, s, Sign::minus);
  write_atomically(config.output_dir / "spectrum_minus.csv", minus.str());
  json summary = {{"n", mesh.size()},
                  {"positives", s.positives.size()},
                  {"negatives", s.negatives.size()},
                  {"trusted_k_max", s.trusted_k_max},
                  {"source_hash", hex_digest(matrix.meta.source_hash)},
                  {"config_hash", hex_digest(config.hash())}};
  try {
    summary["fit"] = to_json(weyl_fit(s, config.window));
  } catch (const insufficient_data& e) {
    summary["fit"] = nullptr;
    summary["fit_error"] = e.what();
  }
  write_atomically(config.output_dir / "fit.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return exit_pass;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw critspec::invalid_argument("not a number: '" + item + "'");
    }
  }
  return out;
}

int cmd_orlicz(const std::string& values_text, const std::string& weights_text, std::optional<double> mass) {
  using namespace critspec;
  const auto v = parse_list(values_text);
  auto w = weights_text.empty() ? std::vector<double>(v.size(), 1.0) : parse_list(weights_text);
  detail::require(v.size() == w.size(), "orlicz-norm: --values and --weights differ in length");
  double total = 0.0;
  for (double x : w) total += x;
  const auto r = averaged_norm(v, w, mass.value_or(total));
  json out = {{"value", r.value}, {"optimal_g", r.optimal_g}, {"constraint_residual", r.constraint_residual}};
  out["multiplier_tau"] = r.multiplier_tau ? json(*r.multiplier_tau) : json(nullptr);
  std::cout << out.dump(2) << "\n";
  return exit_pass;
}

int cmd_covering(const std::string& measure_kind, int size, double lambda, int kappa, const std::string& out) {
  using namespace critspec;
  SingularMeasure m;
  if (measure_kind == "uniform") m = make_grid_measure(size);
  else if (measure_kind == "cantor") m = make_cantor_measure(size);
  else throw invalid_argument("covering: --measure must be 'uniform' or 'cantor'");
  const std::vector<double> v(m.atoms.size(), 1.0);
  CoveringOptions options;
  options.kappa_config = kappa;
  const auto report = build_covering(atoms_of(m), v, lambda, options);
  if (out.empty()) {
    write_covering_record(std::cout, report);
  } else {
    std::ostringstream os;
    write_covering_record(os, report);
    write_atomically(out, os.str());
  }
  std::cerr << to_json(report).dump() << "\n";
  return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critspec: spectral experiments for measure-weighted critical-order operators"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "run one experiment and write its report");
  add_common(run, run_flags, true);

  CommonFlags coeff_flags;
  int max_dim = 6;
  auto* coeff = app.add_subcommand("coeff", "print expected Weyl coefficients (or the rho(N, d) table)");
  add_common(coeff, coeff_flags, false);
  coeff->add_option("--max-dimension", max_dim, "largest N for the rho table")->check(CLI::Range(2, 12));

  CommonFlags spectrum_flags;
  auto* spectrum = app.add_subcommand("spectrum", "compute and export the spectrum of a circle operator");
  add_common(spectrum, spectrum_flags, true);

  std::string values;
  std::string weights;
  std::optional<double> mass;
  auto* orlicz = app.add_subcommand("orlicz-norm", "averaged Orlicz norm of a discrete weight");
  orlicz->add_option("--values", values, "comma-separated V_i")->required();
  orlicz->add_option("--weights", weights, "comma-separated atom masses (default all 1)");
  orlicz->add_option("--mass", mass, "mass of E (default: total mass)");

  std::string measure_kind = "uniform";
  int measure_size = 32;
  double lambda = 0.1;
  int kappa = 4;
  std::string covering_out;
  auto* covering = app.add_subcommand("covering", "build the cube covering of a test measure");
  covering->add_option("--measure", measure_kind, "uniform | cantor");
  covering->add_option("--size", measure_size, "grid cells per side, or Cantor depth");
  covering->add_option("--lambda", lambda, "level lambda")->required();
  covering->add_option("--kappa", kappa, "kappa");
  covering->add_option("--out", covering_out, "record file (default stdout)");

  auto* list = app.add_subcommand("list-experiments", "list experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_usage;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*coeff) return cmd_coeff(coeff_flags, max_dim);
    if (*spectrum) return cmd_spectrum(spectrum_flags);
    if (*orlicz) return cmd_orlicz(values, weights, mass);
    if (*covering) return cmd_covering(measure_kind, measure_size, lambda, kappa, covering_out);
    if (*list) {
      for (const auto& name : critspec::experiment_names()) std::cout << name << "\n";
      return exit_pass;
    }
  } catch (const critspec::resource_limit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return exit_resource;
  } catch (const critspec::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const critspec::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const critspec::insufficient_data& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fail;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_fail;
  }
  return exit_usage;
}
