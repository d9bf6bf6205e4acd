#include "pullin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pullin/errors.hpp"
#include "pullin/parallel.hpp"
#include "pullin/text.hpp"
#include "pullin/units.hpp"

namespace pullin::solver {

BeamSystem::BeamSystem(const Specimen& specimen, const ModelOptions& options)
    : BeamSystem(
          [&] {
            specimen.validate();
            return fem::Mesh(specimen.length, options.n_elements, specimen.bc);
          }(),
          fem::ElementKinematics::for_specimen(specimen), fem::InitialState::for_specimen(specimen), [&] {
            auto cfg = electrostatics::ElectrostaticConfig::for_specimen(specimen);
            cfg.force_scale = options.force_scale;
            return cfg;
          }()) {}

BeamSystem::BeamSystem(fem::Mesh mesh, fem::ElementKinematics kinematics, fem::InitialState initial,
                       electrostatics::ElectrostaticConfig electrostatics)
    : mesh_(std::move(mesh)),
      kinematics_(kinematics),
      initial_(initial),
      electrostatics_(electrostatics) {
  electrostatics_.validate();
  if (!(kinematics_.axial_rigidity > 0.0 && kinematics_.bending_rigidity > 0.0)) {
    throw InputError("section rigidities must be positive");
  }
}

Eigen::VectorXd BeamSystem::dof_scales() const {
  Eigen::VectorXd s(mesh_.dof_count());
  const double g0 = electrostatics_.gap;
  for (std::size_t node = 0; node < mesh_.n_nodes(); ++node) {
    s[fem::Mesh::dof(node, fem::kAxial)] = g0 * g0 / mesh_.length();
    s[fem::Mesh::dof(node, fem::kTransverse)] = g0;
    s[fem::Mesh::dof(node, fem::kRotation)] = g0 / mesh_.length();
  }
  return s;
}

double BeamSystem::reference_force() const {
  const double l = mesh_.length();
  return kinematics_.bending_rigidity * electrostatics_.gap / (l * l * l);
}

double BeamSystem::min_gap(const Eigen::VectorXd& q) const {
  return electrostatics::min_gap(mesh_, q, electrostatics_);
}

CoupledSystem::Evaluation BeamSystem::evaluate(const Eigen::VectorXd& q, double voltage) const {
  Evaluation ev;
  ev.electrostatic = electrostatics::distributed_load(mesh_, q, voltage, electrostatics_);
  ev.residual = fem::internal_force(mesh_, kinematics_, initial_, q) - ev.electrostatic;
  return ev;
}

BandedSymmetricMatrix BeamSystem::tangent(const Eigen::VectorXd& q, double voltage) const {
  BandedSymmetricMatrix k = fem::tangent_stiffness(mesh_, kinematics_, initial_, q);
  if (voltage != 0.0) k -= electrostatics::load_jacobian(mesh_, q, voltage, electrostatics_);
  return k;
}

double BeamSystem::monitor_deflection(const Eigen::VectorXd& q) const {
  return q[fem::Mesh::dof(mesh_.monitor_node(), fem::kTransverse)];
}

fem::BeamState BeamSystem::make_state(Eigen::VectorXd q) const {
  return fem::make_state(mesh_, kinematics_, initial_, std::move(q));
}

LumpedSystem::LumpedSystem(double stiffness, electrostatics::LumpedTransducer transducer, double collapse_fraction)
    : stiffness_(stiffness), transducer_(transducer), collapse_fraction_(collapse_fraction) {
  if (!(stiffness_ > 0.0)) throw InputError("spring stiffness must be positive");
  if (!(transducer_.gap > 0.0 && transducer_.area > 0.0 && transducer_.permittivity > 0.0)) {
    throw InputError("transducer gap, area and permittivity must be positive");
  }
}

Eigen::VectorXd LumpedSystem::dof_scales() const { return Eigen::VectorXd::Constant(1, transducer_.gap); }

CoupledSystem::Evaluation LumpedSystem::evaluate(const Eigen::VectorXd& q, double voltage) const {
  if (transducer_.gap - q[0] <= 0.0) throw PenetrationError("penetration: lumped gap closed");
  Evaluation ev;
  ev.electrostatic = Eigen::VectorXd::Constant(1, transducer_.force(q[0], voltage));
  ev.residual = Eigen::VectorXd::Constant(1, stiffness_ * q[0]) - ev.electrostatic;
  return ev;
}

BandedSymmetricMatrix LumpedSystem::tangent(const Eigen::VectorXd& q, double voltage) const {
  BandedSymmetricMatrix k(1, 0);
  k.add(0, 0, stiffness_ - transducer_.force_slope(q[0], voltage));
  return k;
}

fem::BeamState LumpedSystem::make_state(Eigen::VectorXd q) const { return {std::move(q), {}}; }

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InputError(what);
  };
  require(newton_tol > 0.0, "newton tolerance must be positive");
  require(max_newton_iters > 0, "max newton iterations must be positive");
  require(v_start >= 0.0, "start voltage must be >= 0");
  require(v_start < v_max, "start voltage must be below the maximum voltage");
  require(dv_initial > 0.0, "voltage step must be positive");
  require(vpi_bracket_tol > 0.0, "pull-in bracket tolerance must be positive");
  require(relaxation > 0.0 && relaxation <= 1.0, "relaxation must lie in (0, 1]");
}

fem::BeamState zero_state(const CoupledSystem& system) {
  return system.make_state(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.dof_count())));
}

namespace {

Eigen::VectorXd restrict(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

// Increments larger than this many gaps mean the iteration has diverged.
constexpr double kDivergedScaledStep = 1e3;

}  // namespace

EquilibriumResult solve_equilibrium(const CoupledSystem& system, double voltage, const fem::BeamState& warm_start,
                                    const SolverConfig& config) {
  if (!(voltage >= 0.0)) throw InputError("voltage must be >= 0");
  const auto& free = system.free_dofs();
  const Eigen::VectorXd scale = restrict(system.dof_scales(), free);
  const double energy = system.reference_force() * system.nominal_gap();
  const double collapse = system.collapse_fraction() * system.nominal_gap();

  Eigen::VectorXd q = warm_start.q;
  if (static_cast<std::size_t>(q.size()) != system.dof_count()) {
    q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.dof_count()));
  }

  EquilibriumResult result;
  auto finish = [&](Outcome outcome) {
    result.outcome = outcome;
    result.converged = outcome == Outcome::Converged || outcome == Outcome::Unstable;
    result.stable = outcome == Outcome::Converged;
    result.state = system.make_state(q);
    return result;
  };

  for (int it = 0;; ++it) {
    result.iterations = it;
    result.min_gap = system.min_gap(q);
    if (!(result.min_gap > collapse)) return finish(Outcome::Penetration);

    CoupledSystem::Evaluation ev;
    try {
      ev = system.evaluate(q, voltage);
    } catch (const PenetrationError&) {
      return finish(Outcome::Penetration);
    }
    const Eigen::VectorXd r = restrict(ev.residual, free).cwiseProduct(scale) / energy;
    if (!r.allFinite()) {
      if (voltage == 0.0) throw NumericalError("non-finite residual at zero voltage");
      result.residual_norm = std::numeric_limits<double>::infinity();
      return finish(Outcome::NotConverged);
    }

    BandedSymmetricMatrix k = system.tangent(q, voltage).restricted(free, scale);
    k *= 1.0 / energy;
    const BandedLdlt ldlt(k);
    if (!ldlt.ok()) {
      result.residual_norm = r.norm();
      if (voltage == 0.0) {
        std::ostringstream msg;
        msg << "tangent stiffness breaks down at zero voltage (pivot " << ldlt.breakdown_index()
            << "); check boundary conditions and section data";
        throw NumericalError(msg.str());
      }
      return finish(Outcome::NotConverged);
    }

    const Eigen::VectorXd correction = ldlt.solve(r);
    const Eigen::VectorXd f = restrict(ev.electrostatic, free).cwiseProduct(scale) / energy;
    const double load = f.isZero(0.0) ? 0.0 : std::sqrt(std::abs(f.dot(ldlt.solve(f))));
    result.residual_norm = std::sqrt(std::abs(r.dot(correction))) / std::max(1.0, load);
    if (it > 0 && result.residual_norm < config.newton_tol) {
      return finish(ldlt.positive_definite() ? Outcome::Converged : Outcome::Unstable);
    }
    if (it == config.max_newton_iters) return finish(Outcome::NotConverged);

    const Eigen::VectorXd step = -config.relaxation * correction;
    if (!step.allFinite() || step.lpNorm<Eigen::Infinity>() > kDivergedScaledStep) {
      return finish(Outcome::NotConverged);
    }
    for (std::size_t i = 0; i < free.size(); ++i) q[free[i]] += step[i] * scale[i];
  }
}

namespace {

SweepRecord record(const CoupledSystem& system, double voltage, const EquilibriumResult& r) {
  return {voltage, system.monitor_deflection(r.state.q), r.min_gap, r.iterations, r.ok()};
}

EquilibriumResult start(const CoupledSystem& system, const SolverConfig& config) {
  EquilibriumResult base = solve_equilibrium(system, config.v_start, zero_state(system), config);
  if (!base.ok()) {
    std::ostringstream msg;
    msg << "no stable equilibrium at the start voltage " << config.v_start << " V";
    throw PreconditionError(msg.str());
  }
  return base;
}

}  // namespace

PullInResult sweep_and_bracket(const CoupledSystem& system, const SolverConfig& config) {
  config.validate();
  PullInResult out;
  const EquilibriumResult base = start(system, config);
  out.solves = 1;
  out.newton_iterations = base.iterations;
  out.sweep_trace.push_back(record(system, config.v_start, base));

  double v_low = config.v_start;
  fem::BeamState low_state = base.state;
  auto attempt = [&](double v) {
    EquilibriumResult r = solve_equilibrium(system, v, config.warm_start ? low_state : base.state, config);
    ++out.solves;
    out.newton_iterations += r.iterations;
    return r;
  };

  while (true) {
    if (v_low >= config.v_max) {
      out.status = PullInStatus::NoPullInBelowVmax;
      out.v_low = out.v_high = out.v_pi = v_low;
      out.profile_at_v_low = low_state;
      return out;
    }
    const double v_try = std::min(v_low + config.dv_initial, config.v_max);
    EquilibriumResult r = attempt(v_try);
    if (r.ok()) {
      v_low = v_try;
      low_state = r.state;
      out.sweep_trace.push_back(record(system, v_try, r));
      continue;
    }

    double v_high = v_try;
    EquilibriumResult failed = std::move(r);
    while (v_high - v_low > config.vpi_bracket_tol) {
      const double mid = 0.5 * (v_low + v_high);
      EquilibriumResult m = attempt(mid);
      if (m.ok()) {
        v_low = mid;
        low_state = m.state;
        out.sweep_trace.push_back(record(system, mid, m));
      } else {
        v_high = mid;
        failed = std::move(m);
      }
    }
    out.sweep_trace.push_back(record(system, v_high, failed));
    out.status = PullInStatus::Bracketed;
    out.v_low = v_low;
    out.v_high = v_high;
    out.v_pi = 0.5 * (v_low + v_high);
    out.profile_at_v_low = low_state;
    return out;
  }
}

std::vector<SweepRecord> voltage_sweep(const CoupledSystem& system, const SolverConfig& config) {
  config.validate();
  std::vector<SweepRecord> trace;
  const EquilibriumResult base = start(system, config);
  trace.push_back(record(system, config.v_start, base));
  fem::BeamState state = base.state;
  for (int step = 1;; ++step) {
    const double v = std::min(config.v_start + step * config.dv_initial, config.v_max);
    EquilibriumResult r = solve_equilibrium(system, v, config.warm_start ? state : base.state, config);
    trace.push_back(record(system, v, r));
    if (!r.ok() || v >= config.v_max) break;
    state = r.state;
  }
  return trace;
}

RampResult equilibrium_at(const CoupledSystem& system, double voltage, const SolverConfig& config) {
  config.validate();
  if (!(voltage >= config.v_start)) throw InputError("target voltage must be >= the start voltage");
  RampResult out{start(system, config), config.v_start};
  while (out.voltage < voltage) {
    const double v = std::min(out.voltage + config.dv_initial, voltage);
    EquilibriumResult r = solve_equilibrium(system, v, out.result.state, config);
    out.voltage = v;
    const bool ok = r.ok();
    out.result = std::move(r);
    if (!ok) break;
  }
  return out;
}

PullInResult pull_in(const Specimen& specimen, const ModelOptions& options, const SolverConfig& config) {
  return sweep_and_bracket(BeamSystem(specimen, options), config);
}

namespace {

std::string volts(double v) { return text::format_fixed(v, 3) + " V"; }
std::string mpa(double pa) { return text::format_shortest(units::to_megapascals(pa)) + " MPa"; }

struct BisectionOutcome {
  double parameter;
  double vpi;
  int evaluations;
};

// Bisection on a parameter whose V_PI grows monotonically, stopping once the
// computed V_PI is within `tolerance` of the target. The endpoint values are
// supplied by the caller.
template <typename Vpi>
BisectionOutcome bisect_increasing(Vpi vpi_at, double lo, double v_lo, double hi, double v_hi, double target,
                                   double tolerance) {
  int evaluations = 0;
  if (std::abs(v_lo - target) <= tolerance) return {lo, v_lo, evaluations};
  if (std::abs(v_hi - target) <= tolerance) return {hi, v_hi, evaluations};
  double mid = 0.5 * (lo + hi);
  double v_mid = 0.0;
  for (int iter = 0; iter < 60; ++iter) {
    mid = 0.5 * (lo + hi);
    v_mid = vpi_at(mid);
    ++evaluations;
    if (std::abs(v_mid - target) <= tolerance) break;
    if (v_mid < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {mid, v_mid, evaluations};
}

}  // namespace

IdentificationResult identify_prestress(const Specimen& specimen, const ModelOptions& options, double measured_vpi,
                                        double stress_low, double stress_high, const SolverConfig& config) {
  if (specimen.bc != BoundaryCondition::ClampedClamped) {
    throw PreconditionError("prestress identification needs a clamped-clamped specimen; a cantilever releases "
                            "residual stress into initial curvature");
  }
  if (!(stress_low < stress_high)) throw InputError("stress range must satisfy low < high");
  if (!(measured_vpi > 0.0)) throw InputError("measured pull-in voltage must be positive");
  config.validate();

  int solves = 0;
  int iterations = 0;
  auto vpi_at = [&](double sigma) {
    Specimen s = specimen;
    s.residual_stress = sigma;
    const PullInResult r = pull_in(s, options, config);
    solves += r.solves;
    iterations += r.newton_iterations;
    if (!r.found()) {
      throw RangeError("no pull-in below v_max = " + volts(config.v_max) + " at sigma0 = " + mpa(sigma) +
                       "; raise v_max or lower the stress range");
    }
    return r.v_pi;
  };

  const double v_lo = vpi_at(stress_low);
  const double v_hi = vpi_at(stress_high);
  const double tol = config.vpi_bracket_tol;
  const std::string span = "V_PI(" + mpa(stress_low) + ") = " + volts(v_lo) + ", V_PI(" + mpa(stress_high) +
                           ") = " + volts(v_hi);
  if (measured_vpi < v_lo - tol) {
    throw RangeError("measured V_PI " + volts(measured_vpi) + " is below the range (" + span +
                     "); extend the lower stress bound");
  }
  if (measured_vpi > v_hi + tol) {
    throw RangeError("measured V_PI " + volts(measured_vpi) + " is above the range (" + span +
                     "); extend the upper stress bound");
  }
  const BisectionOutcome b = bisect_increasing(vpi_at, stress_low, v_lo, stress_high, v_hi, measured_vpi, tol);
  return {b.parameter, b.vpi, b.evaluations + 2, solves, iterations};
}

std::vector<SensitivityPoint> prestress_sensitivity(const Specimen& specimen, const ModelOptions& options,
                                                    std::span<const double> stresses, const SolverConfig& config) {
  if (specimen.bc != BoundaryCondition::ClampedClamped) {
    throw PreconditionError("prestress sensitivity needs a clamped-clamped specimen");
  }
  config.validate();
  std::vector<SensitivityPoint> points(stresses.size());
  parallel_for(stresses.size(), [&](std::size_t i) {
    Specimen s = specimen;
    s.residual_stress = stresses[i];
    points[i] = {stresses[i], pull_in(s, options, config)};
  });
  return points;
}

CalibrationResult calibrate_modulus(const Specimen& specimen, const ModelOptions& options, double target_vpi,
                                    double modulus_low, double modulus_high, const SolverConfig& config) {
  if (!(modulus_low > 0.0 && modulus_low < modulus_high)) throw InputError("modulus range must satisfy 0 < low < high");
  auto vpi_at = [&](double modulus) {
    Specimen s = specimen;
    s.material.young_modulus = modulus;
    const PullInResult r = pull_in(s, options, config);
    if (!r.found()) throw RangeError("no pull-in below v_max during modulus calibration");
    return r.v_pi;
  };
  const double v_lo = vpi_at(modulus_low);
  const double v_hi = vpi_at(modulus_high);
  if (target_vpi <= v_lo) return {modulus_low, v_lo};
  if (target_vpi >= v_hi) return {modulus_high, v_hi};
  const BisectionOutcome b =
      bisect_increasing(vpi_at, modulus_low, v_lo, modulus_high, v_hi, target_vpi, config.vpi_bracket_tol);
  return {b.parameter, b.vpi};
}

}  // namespace pullin::solver
