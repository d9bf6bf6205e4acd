#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pullin/banded.hpp"
#include "pullin/domain.hpp"

// Two-node beam elements: linear axial and Hermite cubic transverse shapes,
// von Karman axial strain, initial-state (pre-stress, initial curvature)
// loading.
//
// Generalized strains are {eps, kappa} with eps = u' + v'^2/2 and
// kappa = -v''. Stress resultants are
//   {N, M} = diag(EA, EJ) * ({eps, kappa} - {eps0T, kappa0T}) + {N0, M0},
// with N taken from the element-mean membrane strain (constant per element).
// The transverse displacement v is positive toward the counter-electrode.
namespace pullin::fem {

inline constexpr std::size_t kDofsPerNode = 3;
inline constexpr std::size_t kElementDofs = 6;
/// Element DOFs span two consecutive nodes.
inline constexpr std::size_t kHalfBandwidth = 2 * kDofsPerNode - 1;

enum Dof : std::size_t { kAxial = 0, kTransverse = 1, kRotation = 2 };

using ElementVector = Eigen::Matrix<double, 6, 1>;
using ElementMatrix = Eigen::Matrix<double, 6, 6>;

class Mesh {
 public:
  Mesh(double length, int n_elements, BoundaryCondition bc);

  double length() const { return length_; }
  int n_elements() const { return n_elements_; }
  std::size_t n_nodes() const { return static_cast<std::size_t>(n_elements_) + 1; }
  std::size_t dof_count() const { return kDofsPerNode * n_nodes(); }
  double element_length() const { return length_ / n_elements_; }
  BoundaryCondition bc() const { return bc_; }

  double x(std::size_t node) const { return element_length() * static_cast<double>(node); }
  static std::size_t dof(std::size_t node, Dof d) { return kDofsPerNode * node + d; }
  std::array<std::size_t, kElementDofs> element_dofs(std::size_t element) const;

  /// Ascending; excludes all DOFs of clamped nodes.
  const std::vector<std::size_t>& free_dofs() const { return free_dofs_; }
  bool is_constrained(std::size_t dof) const;

  /// Tip node for cantilevers, midspan node for bridges.
  std::size_t monitor_node() const;

 private:
  double length_;
  int n_elements_;
  BoundaryCondition bc_;
  std::vector<std::size_t> free_dofs_;
};

/// Section rigidities and strain measure.
struct ElementKinematics {
  double axial_rigidity = 0.0;    // E_eff * A
  double bending_rigidity = 0.0;  // E_eff * J
  bool von_karman = true;

  static ElementKinematics for_specimen(const Specimen& specimen);
};

/// Pre-load terms: pre-stress resultants and initial (thermal) strains.
struct InitialState {
  double residual_stress = 0.0;  // sigma0, Pa (informational; N0 carries it)
  double axial_force = 0.0;      // N0 = sigma0 * A, N
  double moment = 0.0;           // M0, N m
  double strain = 0.0;           // eps0T
  double curvature = 0.0;        // kappa0T, 1/m

  /// Cantilevers carry the curvature and no pre-stress; clamped beams carry
  /// N0 = sigma0 * A and no curvature.
  static InitialState for_specimen(const Specimen& specimen);
};

struct BeamState {
  Eigen::VectorXd q;                // size dof_count(), constrained entries zero
  std::vector<double> axial_force;  // element-mean N per element
};

/// Nodal abscissae and weights of the Gauss-Legendre rule on [0, 1]
/// (weights sum to one). Supports 1..8 points.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
};
const QuadratureRule& gauss_rule(int n_points);

/// Points used for all mechanical element integrals. Exact for the linear and
/// geometric stiffness; residual and tangent share it.
inline constexpr int kMechanicalGaussPoints = 3;

/// Hermite cubic shape functions for (v1, theta1, v2, theta2) and their x
/// derivatives at s = x/h in [0, 1].
struct HermiteShapes {
  std::array<double, 4> n;
  std::array<double, 4> dn;
  std::array<double, 4> ddn;
};
HermiteShapes hermite(double s, double h);

/// Element-local positions of the transverse DOFs (v1, theta1, v2, theta2).
inline constexpr std::array<std::size_t, 4> kTransverseLocal{1, 2, 4, 5};

struct ElementResponse {
  ElementVector force = ElementVector::Zero();
  ElementMatrix stiffness = ElementMatrix::Zero();
  double mean_axial_force = 0.0;
};

ElementResponse element_response(const ElementKinematics& kin, const InitialState& init, double h,
                                 const ElementVector& qe, bool with_tangent);

ElementVector gather(const Mesh& mesh, const Eigen::VectorXd& q, std::size_t element);

/// Small-displacement stiffness from M = EJ kappa, N = EA eps.
BandedSymmetricMatrix assemble_linear_stiffness(const Mesh& mesh, const ElementKinematics& kin);

/// Geometric stiffness int N G G^T dx with G = d(v')/dq; one N per element.
BandedSymmetricMatrix assemble_geometric_stiffness(const Mesh& mesh, std::span<const double> axial_force);

/// R(q) = sum_e int B^T {N, M} dx with the initial-state resultants included,
/// over all DOFs (constrained entries are the reactions). Equilibrium is
/// R(q) = F_applied on the free DOFs.
Eigen::VectorXd internal_force(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init,
                               const Eigen::VectorXd& q);

/// dR/dq: linear, geometric (current N) and von Karman coupling terms.
BandedSymmetricMatrix tangent_stiffness(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init,
                                        const Eigen::VectorXd& q);

/// Element-mean axial force for every element.
std::vector<double> recover_axial_force(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init,
                                        const Eigen::VectorXd& q);

BeamState make_state(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init, Eigen::VectorXd q);

/// Solves K q = F on the free DOFs (constrained DOFs stay zero). Throws
/// ConfigurationError when the constrained K is singular or indefinite.
Eigen::VectorXd solve_linear(const Mesh& mesh, const BandedSymmetricMatrix& stiffness, const Eigen::VectorXd& load);

}  // namespace pullin::fem
