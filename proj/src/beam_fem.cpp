#include "pullin/beam_fem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pullin/errors.hpp"

namespace pullin::fem {

Mesh::Mesh(double length, int n_elements, BoundaryCondition bc)
    : length_(length), n_elements_(n_elements), bc_(bc) {
  if (!(length > 0.0)) throw InputError("mesh length must be positive");
  if (n_elements < 1) throw InputError("mesh needs at least one element");
  for (std::size_t d = 0; d < dof_count(); ++d) {
    if (!is_constrained(d)) free_dofs_.push_back(d);
  }
}

std::array<std::size_t, kElementDofs> Mesh::element_dofs(std::size_t element) const {
  const std::size_t first = kDofsPerNode * element;
  return {first, first + 1, first + 2, first + 3, first + 4, first + 5};
}

bool Mesh::is_constrained(std::size_t dof) const {
  const std::size_t node = dof / kDofsPerNode;
  if (node == 0) return true;
  return bc_ == BoundaryCondition::ClampedClamped && node == n_nodes() - 1;
}

std::size_t Mesh::monitor_node() const {
  return bc_ == BoundaryCondition::Cantilever ? n_nodes() - 1 : static_cast<std::size_t>(n_elements_ / 2);
}

ElementKinematics ElementKinematics::for_specimen(const Specimen& specimen) {
  const double e = effective_modulus(specimen.material, specimen.section);
  return {e * specimen.section.area(), e * specimen.section.second_moment(), true};
}

InitialState InitialState::for_specimen(const Specimen& specimen) {
  InitialState init;
  if (specimen.bc == BoundaryCondition::Cantilever) {
    init.curvature = specimen.initial_curvature();
  } else {
    init.residual_stress = specimen.residual_stress;
    init.axial_force = specimen.residual_stress * specimen.section.area();
  }
  return init;
}

namespace {

QuadratureRule make_gauss_rule(int n) {
  // Newton iteration on P_n from the Chebyshev-like initial guesses.
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/(..) halved for [0, 1]
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_rule(int n_points) {
  static const std::array<QuadratureRule, 8> rules = [] {
    std::array<QuadratureRule, 8> r;
    for (int n = 1; n <= 8; ++n) r[n - 1] = make_gauss_rule(n);
    return r;
  }();
  if (n_points < 1 || n_points > 8) throw std::out_of_range("gauss_rule supports 1..8 points");
  return rules[n_points - 1];
}

HermiteShapes hermite(double s, double h) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  HermiteShapes sh;
  sh.n = {1.0 - 3.0 * s2 + 2.0 * s3, h * (s - 2.0 * s2 + s3), 3.0 * s2 - 2.0 * s3, h * (s3 - s2)};
  sh.dn = {(-6.0 * s + 6.0 * s2) / h, 1.0 - 4.0 * s + 3.0 * s2, (6.0 * s - 6.0 * s2) / h, 3.0 * s2 - 2.0 * s};
  sh.ddn = {(-6.0 + 12.0 * s) / (h * h), (-4.0 + 6.0 * s) / h, (6.0 - 12.0 * s) / (h * h), (6.0 * s - 2.0) / h};
  return sh;
}

// N comes from the element-mean membrane strain (locking-free for curved states).
ElementResponse element_response(const ElementKinematics& kin, const InitialState& init, double h,
                                 const ElementVector& qe, bool with_tangent) {
  const QuadratureRule& rule = gauss_rule(kMechanicalGaussPoints);
  ElementResponse out;

  ElementVector axial_op = ElementVector::Zero();  // d(mean eps)/dq
  axial_op[0] = -1.0 / h;
  axial_op[3] = 1.0 / h;
  double eps = (qe[3] - qe[0]) / h;
  ElementMatrix slope_gram = ElementMatrix::Zero();  // int G G^T dx
  std::array<ElementVector, kMechanicalGaussPoints> bend_ops;

  for (std::size_t g = 0; g < rule.points.size(); ++g) {
    const HermiteShapes sh = hermite(rule.points[g], h);
    ElementVector slope_op = ElementVector::Zero();  // G: v' = G q
    ElementVector& bend_op = bend_ops[g];            // B_kappa
    bend_op.setZero();
    for (std::size_t k = 0; k < 4; ++k) {
      slope_op[kTransverseLocal[k]] = sh.dn[k];
      bend_op[kTransverseLocal[k]] = -sh.ddn[k];
    }
    if (kin.von_karman) {
      const double slope = slope_op.dot(qe);
      eps += rule.weights[g] * 0.5 * slope * slope;
      axial_op += rule.weights[g] * slope * slope_op;
      if (with_tangent) slope_gram += rule.weights[g] * h * slope_op * slope_op.transpose();
    }
  }

  const double n = kin.axial_rigidity * (eps - init.strain) + init.axial_force;
  out.mean_axial_force = n;
  out.force = h * n * axial_op;
  if (with_tangent) out.stiffness = h * kin.axial_rigidity * axial_op * axial_op.transpose() + n * slope_gram;

  for (std::size_t g = 0; g < rule.points.size(); ++g) {
    const double dx = rule.weights[g] * h;
    const double m = kin.bending_rigidity * (bend_ops[g].dot(qe) - init.curvature) + init.moment;
    out.force += dx * m * bend_ops[g];
    if (with_tangent) out.stiffness += dx * kin.bending_rigidity * bend_ops[g] * bend_ops[g].transpose();
  }
  return out;
}

ElementVector gather(const Mesh& mesh, const Eigen::VectorXd& q, std::size_t element) {
  ElementVector qe;
  const auto dofs = mesh.element_dofs(element);
  for (std::size_t k = 0; k < kElementDofs; ++k) qe[k] = q[dofs[k]];
  return qe;
}

namespace {

void scatter(const Mesh& mesh, std::size_t element, const ElementMatrix& ke, BandedSymmetricMatrix& k) {
  const auto dofs = mesh.element_dofs(element);
  for (std::size_t a = 0; a < kElementDofs; ++a) {
    for (std::size_t b = 0; b <= a; ++b) k.add(dofs[a], dofs[b], ke(a, b));
  }
}

void check_size(const Mesh& mesh, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != mesh.dof_count()) {
    throw std::invalid_argument("DOF vector size does not match mesh");
  }
}

}  // namespace

BandedSymmetricMatrix assemble_linear_stiffness(const Mesh& mesh, const ElementKinematics& kin) {
  ElementKinematics linear = kin;
  linear.von_karman = false;
  BandedSymmetricMatrix k(mesh.dof_count(), kHalfBandwidth);
  const ElementVector zero = ElementVector::Zero();
  for (std::size_t e = 0; e < static_cast<std::size_t>(mesh.n_elements()); ++e) {
    scatter(mesh, e, element_response(linear, InitialState{}, mesh.element_length(), zero, true).stiffness, k);
  }
  return k;
}

BandedSymmetricMatrix assemble_geometric_stiffness(const Mesh& mesh, std::span<const double> axial_force) {
  if (axial_force.size() != static_cast<std::size_t>(mesh.n_elements())) {
    throw std::invalid_argument("need one axial force per element");
  }
  const QuadratureRule& rule = gauss_rule(kMechanicalGaussPoints);
  const double h = mesh.element_length();
  BandedSymmetricMatrix k(mesh.dof_count(), kHalfBandwidth);
  for (std::size_t e = 0; e < axial_force.size(); ++e) {
    ElementMatrix ke = ElementMatrix::Zero();
    for (std::size_t g = 0; g < rule.points.size(); ++g) {
      const HermiteShapes sh = hermite(rule.points[g], h);
      ElementVector slope_op = ElementVector::Zero();
      for (std::size_t a = 0; a < 4; ++a) slope_op[kTransverseLocal[a]] = sh.dn[a];
      ke += rule.weights[g] * h * axial_force[e] * slope_op * slope_op.transpose();
    }
    scatter(mesh, e, ke, k);
  }
  return k;
}

Eigen::VectorXd internal_force(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init,
                               const Eigen::VectorXd& q) {
  check_size(mesh, q);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(q.size());
  for (std::size_t e = 0; e < static_cast<std::size_t>(mesh.n_elements()); ++e) {
    const ElementResponse resp = element_response(kin, init, mesh.element_length(), gather(mesh, q, e), false);
    const auto dofs = mesh.element_dofs(e);
    for (std::size_t a = 0; a < kElementDofs; ++a) r[dofs[a]] += resp.force[a];
  }
  return r;
}

BandedSymmetricMatrix tangent_stiffness(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init,
                                        const Eigen::VectorXd& q) {
  check_size(mesh, q);
  BandedSymmetricMatrix k(mesh.dof_count(), kHalfBandwidth);
  for (std::size_t e = 0; e < static_cast<std::size_t>(mesh.n_elements()); ++e) {
    scatter(mesh, e, element_response(kin, init, mesh.element_length(), gather(mesh, q, e), true).stiffness, k);
  }
  return k;
}

std::vector<double> recover_axial_force(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init,
                                        const Eigen::VectorXd& q) {
  check_size(mesh, q);
  std::vector<double> n(static_cast<std::size_t>(mesh.n_elements()));
  for (std::size_t e = 0; e < n.size(); ++e) {
    n[e] = element_response(kin, init, mesh.element_length(), gather(mesh, q, e), false).mean_axial_force;
  }
  return n;
}

BeamState make_state(const Mesh& mesh, const ElementKinematics& kin, const InitialState& init, Eigen::VectorXd q) {
  BeamState state;
  state.axial_force = recover_axial_force(mesh, kin, init, q);
  state.q = std::move(q);
  return state;
}

Eigen::VectorXd solve_linear(const Mesh& mesh, const BandedSymmetricMatrix& stiffness, const Eigen::VectorXd& load) {
  check_size(mesh, load);
  const auto& free = mesh.free_dofs();
  const Eigen::VectorXd unit = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(free.size()));
  const BandedLdlt ldlt(stiffness.restricted(free, unit));
  if (!ldlt.positive_definite()) {
    throw ConfigurationError("constrained stiffness is singular or indefinite; the boundary conditions "
                             "leave a rigid-body mode");
  }
  Eigen::VectorXd rhs(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) rhs[i] = load[free[i]];
  Eigen::VectorXd x = ldlt.solve(rhs);
  // One step of iterative refinement.
  const BandedSymmetricMatrix reduced = stiffness.restricted(free, unit);
  x += ldlt.solve(rhs - reduced * x);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(load.size());
  for (std::size_t i = 0; i < free.size(); ++i) q[free[i]] = x[i];
  return q;
}

}  // namespace pullin::fem
