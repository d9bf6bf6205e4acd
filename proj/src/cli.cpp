#include "pullin/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "pullin/domain.hpp"
#include "pullin/errors.hpp"
#include "pullin/solver.hpp"
#include "pullin/specimen_io.hpp"
#include "pullin/text.hpp"
#include "pullin/units.hpp"

namespace pullin::cli {

namespace {

using text::format_fixed;
using text::format_shortest;

struct SpecimenFlags {
  std::string config_path;
  std::string catalog_id;
  std::optional<double> young_modulus_gpa;
  std::optional<double> poisson_ratio;
  std::optional<double> sigma0_mpa;
  std::optional<std::string> fringing;
  std::optional<int> n_elements;
  double force_scale = 1.0;
};

struct Options {
  SpecimenFlags specimen;
  solver::SolverConfig solver;
  bool cold_start = false;
  std::string csv_path;
  std::string out_path;
  double voltage = 0.0;
  double measured_vpi = 0.0;
  std::string sigma_range = "0:100";
  std::string sigma_list;
};

struct Resolved {
  Specimen specimen;
  solver::ModelOptions model;
};

void add_specimen_flags(CLI::App& cmd, Options& o) {
  auto* cfg = cmd.add_option("--config", o.specimen.config_path, "specimen config file (key = value)");
  auto* cat = cmd.add_option("--catalog", o.specimen.catalog_id, "catalog id, e.g. geom5/sample1");
  cfg->excludes(cat);
  cmd.add_option("--E-GPa", o.specimen.young_modulus_gpa, "override Young's modulus (GPa)");
  cmd.add_option("--nu", o.specimen.poisson_ratio, "override Poisson ratio");
  cmd.add_option("--sigma0", o.specimen.sigma0_mpa, "residual stress (MPa, clamped beams)");
  cmd.add_option("--fringing", o.specimen.fringing, "fringing correction on|off");
  cmd.add_option("--n-elements", o.specimen.n_elements, "number of beam elements");
  cmd.add_option("--force-scale", o.specimen.force_scale, "multiplier on the electrostatic load");
}

void add_solver_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--vstart", o.solver.v_start, "start voltage (V)");
  cmd.add_option("--vmax", o.solver.v_max, "maximum voltage (V)");
  cmd.add_option("--dv", o.solver.dv_initial, "voltage step (V)");
  cmd.add_option("--tol-v", o.solver.vpi_bracket_tol, "pull-in bracket width (V)");
  cmd.add_option("--newton-tol", o.solver.newton_tol, "relative residual tolerance");
  cmd.add_option("--max-iter", o.solver.max_newton_iters, "Newton iterations per voltage");
  cmd.add_option("--relaxation", o.solver.relaxation, "Newton under-relaxation in (0, 1]");
  cmd.add_flag("--cold-start", o.cold_start, "start every voltage from the start-voltage equilibrium");
}

Resolved resolve(const SpecimenFlags& flags) {
  Resolved r;
  if (!flags.config_path.empty()) {
    SpecimenFile file = read_specimen_config(flags.config_path);
    r.specimen = std::move(file.specimen);
    r.model.n_elements = file.n_elements;
  } else if (!flags.catalog_id.empty()) {
    r.specimen = lookup(flags.catalog_id).specimen;
  } else {
    throw InputError("give a specimen with --config FILE or --catalog ID");
  }
  Specimen& s = r.specimen;
  if (flags.young_modulus_gpa) s.material.young_modulus = units::from_gigapascals(*flags.young_modulus_gpa);
  if (flags.poisson_ratio) s.material.poisson_ratio = *flags.poisson_ratio;
  if (flags.sigma0_mpa) s.residual_stress = units::from_megapascals(*flags.sigma0_mpa);
  if (flags.fringing) {
    if (*flags.fringing != "on" && *flags.fringing != "off") throw InputError("--fringing expects on or off");
    s.fringing = *flags.fringing == "on";
  }
  if (flags.n_elements) {
    if (*flags.n_elements < 1) throw InputError("--n-elements must be positive");
    r.model.n_elements = *flags.n_elements;
  }
  if (!(flags.force_scale > 0.0)) throw InputError("--force-scale must be positive");
  r.model.force_scale = flags.force_scale;
  s.validate();
  return r;
}

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path.empty()) return nullptr;
  auto file = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*file) throw InputError("cannot open output file '" + path + "'");
  return file;
}

std::vector<double> parse_list(const std::string& list, const std::string& flag) {
  std::vector<double> values;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto v = text::parse_double(item);
    if (!v) throw InputError(flag + ": '" + item + "' is not a number");
    values.push_back(*v);
  }
  if (values.empty()) throw InputError(flag + " needs at least one value");
  return values;
}

std::pair<double, double> parse_range(const std::string& range) {
  const auto colon = range.find(':');
  const auto lo = colon == std::string::npos ? std::nullopt : text::parse_double(range.substr(0, colon));
  const auto hi = colon == std::string::npos ? std::nullopt : text::parse_double(range.substr(colon + 1));
  if (!lo || !hi || !(*lo < *hi)) throw InputError("--sigma-range expects LO:HI in MPa with LO < HI");
  return {*lo, *hi};
}

std::string um(double metres, int decimals = 6) { return format_fixed(units::to_micrometres(metres), decimals); }

/// Height above the clamp plane (positive away from the electrode).
double height(double deflection) { return -deflection; }

void write_trace_csv(std::ostream& os, const std::vector<solver::SweepRecord>& trace) {
  os << "V,deflection_um,min_gap_um,iters,converged\n";
  for (const auto& r : trace) {
    os << format_fixed(r.voltage, 4) << ',' << um(height(r.deflection)) << ',' << um(r.min_gap) << ','
       << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

class Report {
 public:
  Report(std::string_view command, std::ostream& os) : os_(os), start_(std::chrono::steady_clock::now()) {
    os_ << "command: " << command << '\n';
  }

  void specimen(const Resolved& r) {
    os_ << "specimen:\n";
    std::stringstream in(serialize_specimen(r.specimen, r.model.n_elements));
    for (std::string line; std::getline(in, line);) os_ << "  " << line << '\n';
  }

  void parameters(const Options& o) {
    const auto& c = o.solver;
    os_ << "parameters: vstart=" << format_shortest(c.v_start) << " vmax=" << format_shortest(c.v_max)
        << " dv=" << format_shortest(c.dv_initial) << " tol_v=" << format_shortest(c.vpi_bracket_tol)
        << " newton_tol=" << format_shortest(c.newton_tol) << " max_iter=" << c.max_newton_iters
        << " relaxation=" << format_shortest(c.relaxation) << " warm_start=" << (c.warm_start ? "yes" : "no")
        << " force_scale=" << format_shortest(o.specimen.force_scale) << '\n';
  }

  void line(std::string_view key, std::string_view value) { os_ << key << ": " << value << '\n'; }

  void statistics(int solves, int newton_iterations) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    os_ << "statistics: solves=" << solves << " newton_iterations=" << newton_iterations
        << " wall_time_s=" << format_fixed(wall, 3) << '\n';
  }

 private:
  std::ostream& os_;
  std::chrono::steady_clock::time_point start_;
};

int cmd_pullin(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o.specimen);
  const auto csv = open_output(o.csv_path);
  Report report("pullin", out);
  report.specimen(r);
  report.parameters(o);
  const solver::PullInResult result = solver::pull_in(r.specimen, r.model, o.solver);
  if (csv) write_trace_csv(*csv, result.sweep_trace);
  report.statistics(result.solves, result.newton_iterations);
  if (!result.found()) {
    report.line("result", "no pull-in below vmax = " + format_fixed(o.solver.v_max, 4) + " V");
    return kNoPullIn;
  }
  report.line("v_low_V", format_fixed(result.v_low, 4));
  report.line("v_high_V", format_fixed(result.v_high, 4));
  report.line("v_pi_V", format_fixed(result.v_pi, 4));
  return kSuccess;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o.specimen);
  const auto file = open_output(o.out_path);
  std::ostream& csv = file ? *file : out;
  Report report("sweep", file ? out : err);
  report.specimen(r);
  report.parameters(o);
  const auto trace = solver::voltage_sweep(solver::BeamSystem(r.specimen, r.model), o.solver);
  write_trace_csv(csv, trace);
  int iterations = 0;
  for (const auto& rec : trace) iterations += rec.iterations;
  report.statistics(static_cast<int>(trace.size()), iterations);
  if (trace.back().converged) {
    report.line("result", "no failure up to " + format_fixed(trace.back().voltage, 4) + " V");
    return kSuccess;
  }
  report.line("result", "first failure at " + format_fixed(trace.back().voltage, 4) + " V");
  return kSuccess;
}

int cmd_deflect(const Options& o, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o.specimen);
  if (!(o.voltage >= 0.0)) throw InputError("--v must be >= 0");
  const auto file = open_output(o.out_path);
  std::ostream& csv = file ? *file : out;
  std::ostream& log = file ? out : err;
  Report report("deflect", log);
  report.specimen(r);
  report.parameters(o);
  report.line("voltage_V", format_shortest(o.voltage));

  solver::SolverConfig cfg = o.solver;
  cfg.v_start = 0.0;
  cfg.v_max = std::max(cfg.v_max, o.voltage + cfg.dv_initial);
  const solver::BeamSystem system(r.specimen, r.model);
  const solver::RampResult ramp = solver::equilibrium_at(system, o.voltage, cfg);
  if (!ramp.result.ok()) {
    report.line("result", "at or beyond pull-in: no stable equilibrium at " + format_fixed(ramp.voltage, 4) + " V");
    return kNumericalFailure;
  }
  const fem::Mesh& mesh = system.mesh();
  csv << "x_um,v_um\n";
  for (std::size_t node = 0; node < mesh.n_nodes(); ++node) {
    csv << um(mesh.x(node), 4) << ','
        << um(height(ramp.result.state.q[fem::Mesh::dof(node, fem::kTransverse)])) << '\n';
  }
  report.line("monitor_height_um", um(height(system.monitor_deflection(ramp.result.state.q))));
  report.line("min_gap_um", um(ramp.result.min_gap));
  report.statistics(1, ramp.result.iterations);
  return kSuccess;
}

int cmd_identify(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o.specimen);
  if (r.specimen.bc != BoundaryCondition::ClampedClamped) {
    throw PreconditionError("identify needs a clamped-clamped specimen (bc = clamped): cantilevers release residual "
                            "stress into initial curvature, so there is no stress to identify");
  }
  const auto [lo, hi] = parse_range(o.sigma_range);
  Report report("identify", out);
  report.specimen(r);
  report.parameters(o);
  report.line("measured_vpi_V", format_shortest(o.measured_vpi));
  report.line("sigma_range_MPa", format_shortest(lo) + ":" + format_shortest(hi));
  const solver::IdentificationResult id = solver::identify_prestress(
      r.specimen, r.model, o.measured_vpi, units::from_megapascals(lo), units::from_megapascals(hi), o.solver);
  report.line("sigma0_MPa", format_fixed(units::to_megapascals(id.prestress), 3));
  report.line("forward_check_vpi_V", format_fixed(id.vpi, 4));
  report.line("forward_runs", std::to_string(id.evaluations));
  report.statistics(id.solves, id.newton_iterations);
  return kSuccess;
}

int cmd_sensitivity(const Options& o, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o.specimen);
  const std::vector<double> list_mpa = parse_list(o.sigma_list, "--sigma-list");
  const auto file = open_output(o.out_path);
  std::ostream& csv = file ? *file : out;
  Report report("sensitivity", file ? out : err);
  report.specimen(r);
  report.parameters(o);
  std::vector<double> stresses;
  for (double s : list_mpa) stresses.push_back(units::from_megapascals(s));
  const auto points = solver::prestress_sensitivity(r.specimen, r.model, stresses, o.solver);
  csv << "sigma0_MPa,V_PI\n";
  int solves = 0;
  int iterations = 0;
  bool all_found = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i].result;
    csv << format_shortest(list_mpa[i]) << ',' << (p.found() ? format_fixed(p.v_pi, 4) : std::string("nan")) << '\n';
    solves += p.solves;
    iterations += p.newton_iterations;
    all_found = all_found && p.found();
  }
  report.statistics(solves, iterations);
  return all_found ? kSuccess : kNoPullIn;
}

int cmd_catalog(std::ostream& out) {
  out << "id,bc,L_um,w_um,t_um,g_um,y_um,vpi_low_V,vpi_high_V,prestress_MPa,incomplete\n";
  for (const CatalogEntry& e : load_catalog()) {
    const Specimen& s = e.specimen;
    out << e.id << ',' << to_string(s.bc) << ',' << format_shortest(units::micrometres_exact(s.length)) << ','
        << format_shortest(units::micrometres_exact(s.section.width)) << ','
        << format_shortest(units::micrometres_exact(s.section.thickness)) << ','
        << format_shortest(units::micrometres_exact(s.gap)) << ','
        << (s.tip_rise ? format_shortest(units::micrometres_exact(*s.tip_rise)) : std::string()) << ','
        << format_shortest(e.measured_vpi_low) << ',' << format_shortest(e.measured_vpi_high) << ','
        << (e.published_prestress ? format_shortest(units::megapascals_exact(*e.published_prestress)) : std::string())
        << ',' << (e.incomplete ? "yes" : "no") << '\n';
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Electrostatic pull-in of micro-beams with residual stress and initial curvature", "pullin"};
  app.require_subcommand(1, 1);
  Options o;

  auto* pullin = app.add_subcommand("pullin", "bracket the pull-in voltage");
  add_specimen_flags(*pullin, o);
  add_solver_flags(*pullin, o);
  pullin->add_option("--csv", o.csv_path, "write the sweep trace CSV here");

  auto* sweep = app.add_subcommand("sweep", "fixed-step voltage sweep up to the first failure");
  add_specimen_flags(*sweep, o);
  add_solver_flags(*sweep, o);
  sweep->add_option("--out", o.out_path, "CSV output file (default stdout)");

  auto* deflect = app.add_subcommand("deflect", "deflection profile at one voltage");
  add_specimen_flags(*deflect, o);
  add_solver_flags(*deflect, o);
  deflect->add_option("--v", o.voltage, "voltage (V)")->required();
  deflect->add_option("--out", o.out_path, "CSV output file (default stdout)");

  auto* identify = app.add_subcommand("identify", "identify residual stress from a measured pull-in voltage");
  add_specimen_flags(*identify, o);
  add_solver_flags(*identify, o);
  identify->add_option("--vpi", o.measured_vpi, "measured pull-in voltage (V)")->required();
  identify->add_option("--sigma-range", o.sigma_range, "search range LO:HI in MPa (default 0:100)");

  auto* sensitivity = app.add_subcommand("sensitivity", "pull-in voltage versus residual stress");
  add_specimen_flags(*sensitivity, o);
  add_solver_flags(*sensitivity, o);
  sensitivity->add_option("--sigma-list", o.sigma_list, "comma-separated stresses in MPa")->required();
  sensitivity->add_option("--out", o.out_path, "CSV output file (default stdout)");

  auto* catalog = app.add_subcommand("catalog", "list the built-in specimens");

  std::vector<const char*> argv{"pullin"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  o.solver.warm_start = !o.cold_start;

  try {
    if (pullin->parsed()) return cmd_pullin(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (deflect->parsed()) return cmd_deflect(o, out, err);
    if (identify->parsed()) return cmd_identify(o, out);
    if (sensitivity->parsed()) return cmd_sensitivity(o, out, err);
    if (catalog->parsed()) return cmd_catalog(out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInputError;
}

}  // namespace pullin::cli
