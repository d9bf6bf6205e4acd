#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "pullin/banded.hpp"
#include "pullin/beam_fem.hpp"
#include "pullin/domain.hpp"
#include "pullin/electrostatics.hpp"
#include "pullin/specimen_io.hpp"

namespace pullin::solver {

/// Model seen by the Newton solver: residual R_int(q) - F_e(q, V) and its
/// tangent, both over all DOFs, plus the scales used to make the iteration
/// dimensionless.
class CoupledSystem {
 public:
  struct Evaluation {
    Eigen::VectorXd residual;          // R_int - F_e
    Eigen::VectorXd electrostatic;     // F_e
  };

  virtual ~CoupledSystem() = default;

  virtual std::size_t dof_count() const = 0;
  virtual const std::vector<std::size_t>& free_dofs() const = 0;
  /// Magnitude of each unknown: g0 for deflections, g0/L for rotations and
  /// g0^2/L for axial displacements (membrane shortening).
  virtual Eigen::VectorXd dof_scales() const = 0;
  /// Force that moves a translation DOF by one nominal gap.
  virtual double reference_force() const = 0;
  virtual double nominal_gap() const = 0;
  virtual double collapse_fraction() const = 0;

  virtual double min_gap(const Eigen::VectorXd& q) const = 0;
  /// Throws PenetrationError if the gap closes.
  virtual Evaluation evaluate(const Eigen::VectorXd& q, double voltage) const = 0;
  /// K_T - dF_e/dq.
  virtual BandedSymmetricMatrix tangent(const Eigen::VectorXd& q, double voltage) const = 0;
  /// Tip (cantilever) or midspan (bridge) displacement toward the electrode.
  virtual double monitor_deflection(const Eigen::VectorXd& q) const = 0;
  virtual fem::BeamState make_state(Eigen::VectorXd q) const = 0;
};

struct ModelOptions {
  int n_elements = kDefaultElements;
  double force_scale = 1.0;
};

/// Beam finite elements under the distributed electrostatic load.
class BeamSystem final : public CoupledSystem {
 public:
  BeamSystem(const Specimen& specimen, const ModelOptions& options = {});
  BeamSystem(fem::Mesh mesh, fem::ElementKinematics kinematics, fem::InitialState initial,
             electrostatics::ElectrostaticConfig electrostatics);

  const fem::Mesh& mesh() const { return mesh_; }
  const fem::ElementKinematics& kinematics() const { return kinematics_; }
  const fem::InitialState& initial() const { return initial_; }
  const electrostatics::ElectrostaticConfig& electrostatics() const { return electrostatics_; }

  std::size_t dof_count() const override { return mesh_.dof_count(); }
  const std::vector<std::size_t>& free_dofs() const override { return mesh_.free_dofs(); }
  Eigen::VectorXd dof_scales() const override;
  double reference_force() const override;
  double nominal_gap() const override { return electrostatics_.gap; }
  double collapse_fraction() const override { return electrostatics_.collapse_fraction; }
  double min_gap(const Eigen::VectorXd& q) const override;
  Evaluation evaluate(const Eigen::VectorXd& q, double voltage) const override;
  BandedSymmetricMatrix tangent(const Eigen::VectorXd& q, double voltage) const override;
  double monitor_deflection(const Eigen::VectorXd& q) const override;
  fem::BeamState make_state(Eigen::VectorXd q) const override;

 private:
  fem::Mesh mesh_;
  fem::ElementKinematics kinematics_;
  fem::InitialState initial_;
  electrostatics::ElectrostaticConfig electrostatics_;
};

/// Linear spring against a parallel-plate transducer: the single-DOF
/// idealization with a closed-form pull-in.
class LumpedSystem final : public CoupledSystem {
 public:
  LumpedSystem(double stiffness, electrostatics::LumpedTransducer transducer, double collapse_fraction = 0.01);

  double stiffness() const { return stiffness_; }
  const electrostatics::LumpedTransducer& transducer() const { return transducer_; }

  std::size_t dof_count() const override { return 1; }
  const std::vector<std::size_t>& free_dofs() const override { return free_; }
  Eigen::VectorXd dof_scales() const override;
  double reference_force() const override { return stiffness_ * transducer_.gap; }
  double nominal_gap() const override { return transducer_.gap; }
  double collapse_fraction() const override { return collapse_fraction_; }
  double min_gap(const Eigen::VectorXd& q) const override { return transducer_.gap - q[0]; }
  Evaluation evaluate(const Eigen::VectorXd& q, double voltage) const override;
  BandedSymmetricMatrix tangent(const Eigen::VectorXd& q, double voltage) const override;
  double monitor_deflection(const Eigen::VectorXd& q) const override { return q[0]; }
  fem::BeamState make_state(Eigen::VectorXd q) const override;

 private:
  double stiffness_;
  electrostatics::LumpedTransducer transducer_;
  double collapse_fraction_;
  std::vector<std::size_t> free_{0};
};

struct SolverConfig {
  double newton_tol = 1e-9;
  int max_newton_iters = 50;
  double v_start = 0.0;
  double v_max = 400.0;
  double dv_initial = 1.0;
  double vpi_bracket_tol = 0.05;
  double relaxation = 1.0;
  /// Start each voltage step from the previous equilibrium instead of the
  /// v_start equilibrium.
  bool warm_start = true;

  void validate() const;
};

enum class Outcome {
  Converged,     // stable equilibrium
  Unstable,      // converged, but the coupled tangent is not positive definite
  NotConverged,  // iteration limit, divergence or tangent breakdown
  Penetration,   // gap fell below the collapse threshold
};

struct EquilibriumResult {
  bool converged = false;
  bool stable = false;
  Outcome outcome = Outcome::NotConverged;
  fem::BeamState state;
  int iterations = 0;
  double min_gap = 0.0;
  /// sqrt|r^T K_T^-1 r| of the scaled residual, relative to the same norm of
  /// the electrostatic load when that exceeds one.
  double residual_norm = 0.0;

  bool ok() const { return converged && stable; }
};

/// Newton-Raphson on R_int(q) - F_e(q, V) = 0 with the full coupled tangent.
/// Failure to converge is reported in the result; a tangent breakdown at
/// V = 0 (where the mechanical stiffness must be positive definite) throws
/// NumericalError.
EquilibriumResult solve_equilibrium(const CoupledSystem& system, double voltage, const fem::BeamState& warm_start,
                                    const SolverConfig& config);

fem::BeamState zero_state(const CoupledSystem& system);

struct SweepRecord {
  double voltage = 0.0;
  double deflection = 0.0;  // monitor point, toward the electrode
  double min_gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

enum class PullInStatus { Bracketed, NoPullInBelowVmax };

struct PullInResult {
  PullInStatus status = PullInStatus::Bracketed;
  double v_low = 0.0;   // last stable voltage
  double v_high = 0.0;  // first failed voltage
  double v_pi = 0.0;
  fem::BeamState profile_at_v_low;
  std::vector<SweepRecord> sweep_trace;  // strictly increasing in voltage
  int solves = 0;
  int newton_iterations = 0;

  bool found() const { return status == PullInStatus::Bracketed; }
};

/// Steps the voltage by dv_initial from v_start; on the first failure
/// (non-convergence, penetration or loss of stability) bisects the bracket
/// down to vpi_bracket_tol. Throws PreconditionError if the system is not
/// stable at v_start.
PullInResult sweep_and_bracket(const CoupledSystem& system, const SolverConfig& config);

/// Fixed-step sweep from v_start to v_max, stopping at the first failure
/// (included as the last record).
std::vector<SweepRecord> voltage_sweep(const CoupledSystem& system, const SolverConfig& config);

/// Equilibrium at `voltage`, reached by ramping from v_start in dv_initial
/// steps. The result of the first failed step is returned on failure.
struct RampResult {
  EquilibriumResult result;
  double voltage = 0.0;  // voltage of `result`
};
RampResult equilibrium_at(const CoupledSystem& system, double voltage, const SolverConfig& config);

PullInResult pull_in(const Specimen& specimen, const ModelOptions& options, const SolverConfig& config);

struct IdentificationResult {
  double prestress = 0.0;  // Pa
  double vpi = 0.0;        // forward check at the identified stress
  int evaluations = 0;     // forward pull-in runs
  int solves = 0;          // equilibrium solves over all runs
  int newton_iterations = 0;
};

/// Bisection on sigma0 in [stress_low, stress_high] until the computed V_PI is
/// within vpi_bracket_tol of `measured_vpi`. Clamped-clamped specimens only.
IdentificationResult identify_prestress(const Specimen& specimen, const ModelOptions& options, double measured_vpi,
                                        double stress_low, double stress_high, const SolverConfig& config);

struct SensitivityPoint {
  double prestress = 0.0;
  PullInResult result;
};

/// One pull-in search per stress, possibly concurrent; output in input order.
std::vector<SensitivityPoint> prestress_sensitivity(const Specimen& specimen, const ModelOptions& options,
                                                    std::span<const double> stresses, const SolverConfig& config);

struct CalibrationResult {
  double young_modulus = 0.0;
  double vpi = 0.0;
};

/// Young's modulus in [modulus_low, modulus_high] whose V_PI is closest to
/// `target_vpi` (V_PI grows with E, so bisection; clamps at the bounds).
CalibrationResult calibrate_modulus(const Specimen& specimen, const ModelOptions& options, double target_vpi,
                                    double modulus_low, double modulus_high, const SolverConfig& config);

}  // namespace pullin::solver
