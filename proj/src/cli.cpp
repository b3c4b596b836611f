#include "loadcouple/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "loadcouple/analysis.hpp"
#include "loadcouple/scenario.hpp"
#include "loadcouple/table.hpp"

namespace loadcouple::cli {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void apply_thread_cap() {
  if (const char* env = std::getenv("LOADCOUPLE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) omp_set_num_threads(static_cast<int>(n));
  }
}

NetworkInstance load_valid(const std::string& path) {
  NetworkInstance inst = load_instance(path);
  const auto violations = validate(inst);
  if (!violations.empty()) {
    std::string msg = "invalid instance '" + path + "':";
    for (const auto& v : violations) msg += "\n  " + v.code + ": " + v.message;
    throw InputError(msg);
  }
  return inst;
}

std::string cell_value(const std::optional<LoadVector>& v, int i) {
  return v ? format_real((*v)(i)) : std::string("n/a");
}

std::vector<double> parse_scales(const std::string& text) {
  std::istringstream ss(text);
  double a = 0, b = 0;
  long n = 0;
  char c1 = 0, c2 = 0;
  if (!(ss >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !ss.eof() || n < 1 || !(a > 0) ||
      (n > 1 && !(b > a))) {
    throw InputError("--scales expects a:b:n with 0 < a < b and n >= 1, got '" + text + "'");
  }
  std::vector<double> out;
  for (long k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(k) / (n - 1));
  return out;
}

std::pair<int, double> parse_rotation(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
    std::size_t used = 0;
    const int cell = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("cell");
    const std::string az = text.substr(colon + 1);
    const double azimuth = std::stod(az, &used);
    if (used != az.size()) throw std::invalid_argument("azimuth");
    return {cell, azimuth};
  } catch (const std::exception&) {
    throw InputError("--rotate expects cell:azimuth_deg, got '" + text + "'");
  }
}

int cmd_generate(const std::string& spec_path, const std::string& out_path, const std::vector<std::string>& rotations,
                 std::ostream& out) {
  const ScenarioSpec spec = load_scenario_spec(spec_path);
  NetworkInstance inst = generate(spec);
  for (const auto& r : rotations) {
    const auto [cell, azimuth] = parse_rotation(r);
    if (cell < 1 || cell > inst.num_cells()) throw InputError("--rotate: no cell " + std::to_string(cell));
    inst = rotate_sector(inst, cell - 1, azimuth, {spec.beamwidth_deg, spec.front_to_back_db});
  }
  save_instance(inst, out_path);
  out << "wrote " << inst.num_cells() << " cells, " << inst.num_pixels() << " pixels to " << out_path << "\n";
  return kOk;
}

struct SolveArgs {
  std::string instance, out, method = "newton";
  double tol = 1e-10;
  double interval_width = 0.0;
  int max_iter = 10000;
};

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  const NetworkInstance inst = load_valid(args.instance);
  const CouplingCoefficients coeffs = coefficients(inst);
  SolverConfig config;
  if (args.method == "fp") {
    config.method = SolveMethod::fixed_point;
  } else if (args.method == "newton") {
    config.method = SolveMethod::newton;
  } else {
    throw InputError("--method must be fp or newton");
  }
  if (!(args.tol > 0.0)) throw InputError("--tol must be positive");
  if (args.max_iter < 1) throw InputError("--max-iter must be positive");
  config.tol_residual = args.tol;
  config.max_iter = args.max_iter;
  const SolveReport report = args.interval_width > 0.0 ? solve_with_interval_stop(coeffs, args.interval_width, config)
                                                       : solve(coeffs, config);

  CsvTable table({"cell_id", "rho_star", "rho_lower", "rho_upper", "residual"});
  table.add_comment(std::string("status=") + to_string(report.status));
  table.add_comment("iterations=" + format_int(report.iterations));
  table.add_comment(std::string("h0_status=") + to_string(report.feasibility.status));
  table.add_comment("h0_spectral_radius=" + format_real(report.feasibility.spectral_radius));
  if (!report.feasibility.fully_coupled) table.add_comment("h0_reducible=true");
  std::optional<LoadVector> row_residual;
  if (report.iterate.size() == coeffs.num_cells) {
    row_residual = (report.iterate - load_function(coeffs, report.iterate)).cwiseAbs();
    table.add_comment("residual_inf=" + format_real(report.residual));
  }
  for (int i = 0; i < coeffs.num_cells; ++i) {
    table.add_row({format_int(i + 1), cell_value(report.fixed_point, i), cell_value(report.lower, i),
                   cell_value(report.upper, i), cell_value(row_residual, i)});
  }
  table.save(args.out);
  out << to_string(report.status) << " after " << report.iterations << " iterations\n";
  switch (report.status) {
    case SolveStatus::converged:
    case SolveStatus::interval_reached: return kOk;
    case SolveStatus::infeasible: return kInfeasible;
    case SolveStatus::max_iter_exceeded:
    case SolveStatus::diverged: return kMaxIterations;
  }
  return kMaxIterations;
}

int cmd_feasibility(const std::string& path, std::ostream& out) {
  const NetworkInstance inst = load_valid(path);
  const auto verdict = feasibility_check(inst);
  out << (verdict.feasible ? "feasible" : "infeasible") << "\n";
  out << "spectral_radius " << format_real(verdict.outcome.spectral_radius) << "\n";
  out << "h0_status " << to_string(verdict.outcome.status) << "\n";
  if (!verdict.outcome.fully_coupled) out << "note: coupling matrix has zero off-diagonal entries\n";
  if (verdict.outcome.solution) {
    out << "lower_bound";
    for (Eigen::Index i = 0; i < verdict.outcome.solution->size(); ++i) {
      out << ' ' << format_real((*verdict.outcome.solution)(i));
    }
    out << "\n";
  }
  return verdict.feasible ? kOk : kInfeasible;
}

int cmd_sweep(const std::string& path, const std::string& scales_text, const std::string& out_path,
              const std::string& plot_path, bool serial, std::ostream& out) {
  const NetworkInstance inst = load_valid(path);
  const auto scales = parse_scales(scales_text);
  const auto rows = serial ? demand_sweep_serial(inst, scales) : demand_sweep(inst, scales);
  const int n = inst.num_cells();
  std::vector<std::string> columns = {"scale", "feasible", "spectral_radius", "status"};
  for (int i = 1; i <= n; ++i) columns.push_back("rho_star_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) columns.push_back("rho_lower_" + std::to_string(i));
  CsvTable table(columns);
  double last_feasible = 0.0;
  for (const auto& r : rows) {
    std::vector<std::string> cells = {format_real(r.scale), r.feasible ? "1" : "0", format_real(r.spectral_radius),
                                      to_string(r.status)};
    for (int i = 0; i < n; ++i) cells.push_back(cell_value(r.rho_star, i));
    for (int i = 0; i < n; ++i) cells.push_back(cell_value(r.rho_lower, i));
    table.add_row(std::move(cells));
    if (r.feasible) last_feasible = r.scale;
  }
  table.add_comment("last_feasible_scale=" + format_real(last_feasible));
  table.save(out_path);
  if (!plot_path.empty()) {
    std::ofstream plot(plot_path);
    if (!plot) throw std::runtime_error("cannot write '" + plot_path + "'");
    plot << "# scale verdict";
    for (int i = 1; i <= n; ++i) plot << " load_" << i;
    plot << "\n";
    for (const auto& r : rows) {
      plot << format_real(r.scale) << ' ' << (r.feasible ? 1 : 0);
      for (int i = 0; i < n; ++i) plot << ' ' << (r.rho_star ? format_real((*r.rho_star)(i)) : "nan");
      plot << "\n";
    }
  }
  out << "last feasible scale " << format_real(last_feasible) << "\n";
  return kOk;
}

int cmd_boundary(const std::string& path, double lo, double hi, double tol, std::ostream& out, std::ostream& err) {
  const NetworkInstance inst = load_valid(path);
  if (!(lo > 0.0) || !(hi > lo) || !(tol > 0.0)) throw InputError("boundary needs 0 < lo < hi and tol > 0");
  BoundaryResult b;
  try {
    b = feasibility_boundary(inst, lo, hi, tol);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  out << "boundary_scale " << format_real(b.scale) << "\n";
  out << "last_feasible " << format_real(b.last_feasible) << "\n";
  out << "first_infeasible " << format_real(b.first_infeasible) << "\n";
  out << "spectral_radius " << format_real(b.spectral_radius) << "\n";
  return kOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out_path, std::ostream& out) {
  const NetworkInstance a = load_valid(a_path);
  const NetworkInstance b = load_valid(b_path);
  if (a.num_cells() != b.num_cells()) throw InputError("configurations must have the same number of cells");
  const auto report = compare_configs(a, b);
  CsvTable table({"cell_id", "a_rho_star", "a_rho_lower", "a_rho_upper", "b_rho_star", "b_rho_lower", "b_rho_upper"});
  table.add_comment(std::string("verdict=") + to_string(report.verdict));
  table.add_comment(std::string("base_verdict=") + to_string(report.base_verdict));
  table.add_comment("a_boundary_scale=" + format_real(report.a.boundary_scale));
  table.add_comment("b_boundary_scale=" + format_real(report.b.boundary_scale));
  for (int i = 0; i < a.num_cells(); ++i) {
    table.add_row({format_int(i + 1), cell_value(report.a.rho_star, i), cell_value(report.a.rho_lower, i),
                   cell_value(report.a.rho_upper, i), cell_value(report.b.rho_star, i),
                   cell_value(report.b.rho_lower, i), cell_value(report.b.rho_upper, i)});
  }
  table.save(out_path);
  out << "verdict " << to_string(report.verdict) << "\n";
  out << "a_boundary_scale " << format_real(report.a.boundary_scale) << "\n";
  out << "b_boundary_scale " << format_real(report.b.boundary_scale) << "\n";
  return kOk;
}

int cmd_bounds(const std::string& path, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const NetworkInstance inst = load_valid(path);
  std::vector<BoundQualityRow> rows;
  try {
    rows = bound_quality(inst);
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  CsvTable table({"cell_id", "rho_star", "rho_lower", "rho_upper", "lower_gap_pct", "upper_gap_pct"});
  for (const auto& r : rows) {
    table.add_row({format_int(r.cell + 1), format_real(r.rho_star), format_real(r.rho_lower),
                   r.rho_upper ? format_real(*r.rho_upper) : "n/a", format_real(r.lower_gap_pct),
                   r.upper_gap_pct ? format_real(*r.upper_gap_pct) : "n/a"});
  }
  table.save(out_path);
  out << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const NetworkInstance inst = load_instance(path);
  const auto violations = validate(inst);
  for (const auto& v : violations) out << v.code << ": " << v.message << "\n";
  if (violations.empty()) out << "valid\n";
  return violations.empty() ? kOk : kInvalidInput;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  apply_thread_cap();
  CLI::App app{"LTE load-coupling solver and planning analysis", "loadcouple"};
  app.require_subcommand(1);

  std::string spec_path, out_path, instance_path, a_path, b_path, scales, plot_path;
  std::vector<std::string> rotations;
  SolveArgs solve_args;
  double lo = 0.0, hi = 0.0, tol = 1e-6;
  bool serial = false;

  auto* generate_cmd = app.add_subcommand("generate", "Generate a network instance from a scenario spec");
  generate_cmd->add_option("--spec", spec_path, "Scenario spec file")->required();
  generate_cmd->add_option("--out", out_path, "Instance file to write")->required();
  generate_cmd->add_option("--rotate", rotations, "Point a cell at an azimuth, cell:degrees (1-based cell)");

  auto* solve_cmd = app.add_subcommand("solve", "Solve for the fixed-point cell loads");
  solve_cmd->add_option("--instance", solve_args.instance)->required();
  solve_cmd->add_option("--method", solve_args.method, "fp or newton")->capture_default_str();
  solve_cmd->add_option("--tol", solve_args.tol, "Relative residual tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iter", solve_args.max_iter)->capture_default_str();
  solve_cmd->add_option("--interval-width", solve_args.interval_width,
                        "Stop once the certified interval is this narrow");
  solve_cmd->add_option("--out", solve_args.out, "CSV output")->required();

  auto* feas_cmd = app.add_subcommand("feasibility", "Exact feasibility test via the asymptotic linear system");
  feas_cmd->add_option("--instance", instance_path)->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a uniform demand-scale grid");
  sweep_cmd->add_option("--instance", instance_path)->required();
  sweep_cmd->add_option("--scales", scales, "a:b:n")->required();
  sweep_cmd->add_option("--out", out_path)->required();
  sweep_cmd->add_option("--plot-data", plot_path, "Whitespace-separated scale/verdict/load file");
  sweep_cmd->add_flag("--serial", serial, "Evaluate in order with warm starts");

  auto* boundary_cmd = app.add_subcommand("boundary", "Locate the feasibility boundary in demand scale");
  boundary_cmd->add_option("--instance", instance_path)->required();
  boundary_cmd->add_option("--lo", lo)->required();
  boundary_cmd->add_option("--hi", hi)->required();
  boundary_cmd->add_option("--tol", tol)->capture_default_str();

  auto* compare_cmd = app.add_subcommand("compare", "Compare two configurations of the same network");
  compare_cmd->add_option("--a", a_path)->required();
  compare_cmd->add_option("--b", b_path)->required();
  compare_cmd->add_option("--out", out_path)->required();

  auto* bounds_cmd = app.add_subcommand("bounds", "Lower/upper bound quality per cell");
  bounds_cmd->add_option("--instance", instance_path)->required();
  bounds_cmd->add_option("--out", out_path)->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check an instance file against the model invariants");
  validate_cmd->add_option("--instance", instance_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    if (*generate_cmd) return cmd_generate(spec_path, out_path, rotations, out);
    if (*solve_cmd) return cmd_solve(solve_args, out);
    if (*feas_cmd) return cmd_feasibility(instance_path, out);
    if (*sweep_cmd) return cmd_sweep(instance_path, scales, out_path, plot_path, serial, out);
    if (*boundary_cmd) return cmd_boundary(instance_path, lo, hi, tol, out, err);
    if (*compare_cmd) return cmd_compare(a_path, b_path, out_path, out);
    if (*bounds_cmd) return cmd_bounds(instance_path, out_path, out, err);
    if (*validate_cmd) return cmd_validate(instance_path, out);
  } catch (const InstanceError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace loadcouple::cli
