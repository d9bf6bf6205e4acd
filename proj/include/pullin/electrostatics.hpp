#pragma once

#include <Eigen/Core>

#include "pullin/banded.hpp"
#include "pullin/beam_fem.hpp"
#include "pullin/domain.hpp"

namespace pullin::electrostatics {

/// Coefficient of the first-order (Palmer) fringing correction 1 + c*g/w.
inline constexpr double kPalmerCoefficient = 0.65;

struct ElectrostaticConfig {
  double permittivity = 0.0;    // F/m
  double electrode_width = 0.0; // m
  double gap = 0.0;             // nominal g0, m
  bool fringing = false;
  double collapse_fraction = 0.01;
  /// Empirical multiplier on the electrostatic load (1 = none).
  double force_scale = 1.0;
  int quadrature_points = 4;

  static ElectrostaticConfig for_specimen(const Specimen& specimen);
  void validate() const;

  double fringing_factor(double local_gap) const;
  /// Load per unit length eps*w*V^2/(2 g^2) * f_fr(g), toward the electrode.
  double line_load(double local_gap, double voltage) const;
  /// d(line_load)/dv = -d(line_load)/dg.
  double line_load_slope(double local_gap, double voltage) const;
};

/// Smallest local gap g0 - v over the electrostatic quadrature points.
double min_gap(const fem::Mesh& mesh, const Eigen::VectorXd& q, const ElectrostaticConfig& cfg);

/// Consistent nodal forces of the gap-dependent line load on the transverse
/// DOFs; positive = gap-closing. Throws PenetrationError if the gap is <= 0 at
/// any quadrature point.
Eigen::VectorXd distributed_load(const fem::Mesh& mesh, const Eigen::VectorXd& q, double voltage,
                                 const ElectrostaticConfig& cfg);

/// dF_e/dq (electrostatic softening), transverse block only.
BandedSymmetricMatrix load_jacobian(const fem::Mesh& mesh, const Eigen::VectorXd& q, double voltage,
                                    const ElectrostaticConfig& cfg);

/// Reduced-order parallel-plate transducer: one translation x toward the
/// electrode and a prescribed potential. C(x) = eps*A/(g0 - x).
struct LumpedTransducer {
  double area = 0.0;          // A_e, m^2
  double gap = 0.0;           // g0, m
  double permittivity = 0.0;  // F/m

  double capacitance(double x) const;
  /// V^2/2 * dC/dx, attractive.
  double force(double x, double voltage) const;
  /// d(force)/dx.
  double force_slope(double x, double voltage) const;
};

struct LumpedPullIn {
  double voltage = 0.0;
  double displacement = 0.0;
};

/// Closed-form pull-in of a linear spring k against the transducer:
/// x = g0/3, V = sqrt(8 k g0^3 / (27 eps A)).
LumpedPullIn lumped_pullin(double stiffness, const LumpedTransducer& transducer);

}  // namespace pullin::electrostatics
